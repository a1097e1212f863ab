#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pmm2 {

/// First-stage estimate. Coefficients are stacked (phi, theta, intercept?).
struct BaselineFit {
    std::size_t p = 0;
    std::size_t q = 0;
    bool intercept = false;
    std::vector<double> coef;
    /// Classical standard errors sqrt(diag(sigma2 (J'J)^-1)), J the residual Jacobian.
    std::vector<double> se;
    double sigma2 = 0.0;
    /// Conditional residuals for t = max(p,q)+1..n.
    std::vector<double> residuals;
    /// Sum of squared residuals at the final iterate.
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

struct CssConfig {
    std::size_t max_iterations = 50;
    /// On the gradient of the mean squared residual, sup norm.
    double gradient_tolerance = 1e-8;
    /// On the step, sup norm relative to (1 + |coef|).
    double step_tolerance = 1e-10;
    std::size_t max_halvings = 20;
    double admissibility_margin = 1e-3;
};

/// Least squares on the lag design z_t ~ (z_{t-1}, ..., z_{t-p}, 1?), rows
/// t = p+1..n. Throws RankError when X'X is singular and LengthError when
/// there are fewer rows than regressors.
BaselineFit ols_ar(std::span<const double> z, std::size_t p, bool intercept);

/// Conditional sum of squares by damped Gauss-Newton with a forward
/// difference residual Jacobian. `init` defaults to OLS for phi and zeros for
/// theta. Every trial point is projected onto the admissible region. A run
/// that hits the iteration cap returns the best iterate with converged=false.
BaselineFit css_estimate(std::span<const double> z, std::size_t p, std::size_t q, bool intercept,
                         std::optional<std::vector<double>> init = std::nullopt,
                         const CssConfig& cfg = {});

/// Sum of squared conditional residuals at `coef`.
double css_objective(std::span<const double> z, std::size_t p, std::size_t q, bool intercept,
                     std::span<const double> coef);

}  // namespace pmm2

#pragma once

#include "pmm2/baseline.hpp"
#include "pmm2/moments.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pmm2 {

/// Fixed pseudo-regressor design for the second stage.
///
/// Row r corresponds to t = m + 1 + r and holds
///   (z_{t-1}, ..., z_{t-p}, e_{t-1}, ..., e_{t-q}, 1?)
/// where e are the first-stage residuals (zero before the presample cut).
/// The design does not depend on the parameters being solved for.
struct Pmm2Design {
    Eigen::MatrixXd x;
    Eigen::VectorXd response;
    std::size_t m = 0;
    std::size_t p = 0;
    std::size_t q = 0;
    bool intercept = false;

    Eigen::Index rows() const { return x.rows(); }
    Eigen::Index cols() const { return x.cols(); }
};

/// `baseline_residuals` must be aligned with z_{m+1..n} (as returned by the
/// baseline estimators). Throws LengthError on a length mismatch.
Pmm2Design build_design(std::span<const double> z, std::span<const double> baseline_residuals,
                        std::size_t p, std::size_t q, bool intercept);
Pmm2Design build_design(std::span<const double> z, const BaselineFit& baseline);

/// Estimating equations g(theta) = sum_t x_t s_t(theta) with
///   s_t = [(mu4 - mu2^2 + 2 mu3 eta_t)(z_t - eta_t) - mu3 (z_t^2 - eta_t^2 - mu2)] / delta,
/// eta_t = x_t' theta.
Eigen::VectorXd score(const Eigen::VectorXd& theta, const Pmm2Design& design, const MomentSet& moments);

/// Per-row bracketed term s_t(theta).
Eigen::VectorXd score_terms(const Eigen::VectorXd& theta, const Pmm2Design& design,
                            const MomentSet& moments);

/// Same system multiplied by delta and grouped by powers of eta_t:
///   sum_t x_t [A eta_t^2 + B_t eta_t + C_t],
///   A = mu3, B_t = (mu4 - mu2^2) - 2 mu3 z_t, C_t = mu3 z_t^2 - z_t (mu4 - mu2^2) - mu2 mu3.
/// Equals -delta * score(theta).
Eigen::VectorXd grouped_quadratic_form(const Eigen::VectorXd& theta, const Pmm2Design& design,
                                       const MomentSet& moments);

/// d g / d theta = sum_t lambda_t x_t x_t',
///   lambda_t = [2 mu3 (z_t - eta_t) - (mu4 - mu2^2)] / delta.
Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta, const Pmm2Design& design, const MomentSet& moments);

struct NewtonConfig {
    std::size_t max_iterations = 50;
    double score_tolerance = 1e-6;  // sup norm of g
    double step_tolerance = 1e-8;   // sup norm of the Newton step
    std::size_t max_halvings = 20;
    double admissibility_margin = 1e-3;
    bool project = true;
};

struct Pmm2Fit {
    std::size_t p = 0;
    std::size_t d = 0;
    std::size_t q = 0;
    bool intercept = false;
    /// Stacked (phi, theta, intercept?).
    std::vector<double> coef;
    MomentSet moments;
    double score_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool fallback_used = false;
    /// Newton used a pseudo-inverse step at least once.
    bool singular_jacobian = false;
    /// Residuals recomputed through the ARMA recursion at the final estimate.
    std::vector<double> residuals;
    std::vector<std::string> warnings;

    // Fit context, filled by fit(); empty after a bare newton_solve().
    BaselineFit baseline;
    Pmm2Design design;
    std::size_t outer_iterations = 0;
};

/// Newton-Raphson on g(theta) = 0 with step halving on growth of |g|.
/// Iterates are projected onto the admissible region when cfg.project.
/// Only coef/score_norm/iterations/converged/singular_jacobian/moments are filled.
Pmm2Fit newton_solve(const Eigen::VectorXd& init, const Pmm2Design& design, const MomentSet& moments,
                     const NewtonConfig& cfg = {});

enum class BaselineMethod { Css, Ols };

struct FitConfig {
    BaselineMethod baseline = BaselineMethod::Css;
    bool intercept = false;
    /// |gamma3| below this keeps the baseline estimate.
    double symmetry_threshold = 0.1;
    /// Re-estimate moments from second-stage residuals and re-solve.
    bool adaptive = false;
    std::size_t adaptive_max_outer = 5;
    double adaptive_moment_tolerance = 1e-6;
    NewtonConfig newton;
    CssConfig css;
};

/// Two-stage estimator on an undifferenced series y:
/// difference, baseline fit, design, moments from baseline residuals,
/// Newton solve from the baseline estimate, then residual reconstruction.
/// Falls back to the baseline when |gamma3| < cfg.symmetry_threshold or the
/// moment set is degenerate.
Pmm2Fit fit(std::span<const double> y, std::size_t p, std::size_t d, std::size_t q,
            const FitConfig& cfg = {});

/// Second stage only, on an existing baseline for the differenced series z.
Pmm2Fit fit_from_baseline(std::span<const double> z, std::size_t d, const BaselineFit& baseline,
                          const FitConfig& cfg = {});

}  // namespace pmm2

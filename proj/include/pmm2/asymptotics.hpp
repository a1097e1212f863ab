#pragma once

#include "pmm2/moments.hpp"
#include "pmm2/pmm2.hpp"

#include <Eigen/Core>

namespace pmm2 {

/// Sandwich covariance of the second-stage estimator:
///   A = J(theta) / n_eff,  B = (1/n_eff) sum_t psi_t psi_t',  psi_t = x_t s_t(theta),
///   sigma = A^-1 B A^-T,  se_j = sqrt(sigma_jj / n_eff).
/// First-stage estimation error is not propagated.
struct CovarianceReport {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    Eigen::MatrixXd sigma;
    Eigen::VectorXd se;
    std::size_t n_eff = 0;
    /// A was singular and a ridge 1e-10 * trace(|A|) was added before inversion.
    bool regularized = false;
};

CovarianceReport sandwich(const Eigen::VectorXd& theta, const Pmm2Design& design, const MomentSet& moments);
CovarianceReport sandwich(const Pmm2Fit& fit, const Pmm2Design& design);
/// Uses the design stored in the fit.
CovarianceReport sandwich(const Pmm2Fit& fit);

/// Least-squares covariance on the same design, on the scale of
/// CovarianceReport::sigma: sigma2 (X'X / n_eff)^-1.
Eigen::MatrixXd ols_covariance(const Pmm2Design& design, double sigma2);

/// Scalar asymptotic variance ratio OLS / PMM2 for a standardized law:
///   (2 + gamma4) / ((2 + gamma4) - gamma3^2).
/// This is mu2 (mu4 - mu2^2) / delta. Throws DomainError unless
/// 2 + gamma4 > gamma3^2.
double re_theoretical(double gamma3, double gamma4);

/// The alternative (4 + 2 gamma4) / (4 + 2 gamma4 - gamma3^2) form, kept for
/// side-by-side reporting. Throws DomainError when the denominator is <= 0.
double re_theoretical_alt(double gamma3, double gamma4);

struct MatrixEfficiency {
    double re_det = 1.0;    // (|S_ols| / |S_pmm2|)^(1/k)
    double re_trace = 1.0;  // tr(S_ols) / tr(S_pmm2)
};

/// Throws DomainError unless both matrices are symmetric positive definite
/// and of equal size.
MatrixEfficiency re_matrix(const Eigen::MatrixXd& sigma_ols, const Eigen::MatrixXd& sigma_pmm2);

}  // namespace pmm2

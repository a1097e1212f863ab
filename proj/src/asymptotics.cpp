#include "pmm2/asymptotics.hpp"

#include "pmm2/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace pmm2 {

using Eigen::MatrixXd;
using Eigen::VectorXd;

CovarianceReport sandwich(const VectorXd& theta, const Pmm2Design& design, const MomentSet& moments) {
    const auto n = static_cast<double>(design.rows());
    if (design.rows() == 0) throw LengthError("sandwich: empty design");

    CovarianceReport rep;
    rep.n_eff = static_cast<std::size_t>(design.rows());
    rep.a = jacobian(theta, design, moments) / n;
    const VectorXd s = score_terms(theta, design, moments);
    const MatrixXd psi = design.x.array().colwise() * s.array();
    rep.b = psi.transpose() * psi / n;

    Eigen::FullPivLU<MatrixXd> lu(rep.a);
    MatrixXd a_inv;
    if (lu.isInvertible()) {
        a_inv = lu.inverse();
    } else {
        rep.regularized = true;
        const double ridge = 1e-10 * rep.a.cwiseAbs().diagonal().sum();
        const MatrixXd reg = rep.a + ridge * MatrixXd::Identity(rep.a.rows(), rep.a.cols());
        a_inv = reg.fullPivLu().inverse();
    }
    rep.sigma = a_inv * rep.b * a_inv.transpose();
    rep.sigma = 0.5 * (rep.sigma + rep.sigma.transpose());
    rep.se = (rep.sigma.diagonal().array().max(0.0) / n).sqrt().matrix();
    return rep;
}

CovarianceReport sandwich(const Pmm2Fit& fit, const Pmm2Design& design) {
    const VectorXd theta = Eigen::Map<const VectorXd>(fit.coef.data(), static_cast<Eigen::Index>(fit.coef.size()));
    return sandwich(theta, design, fit.moments);
}

CovarianceReport sandwich(const Pmm2Fit& fit) { return sandwich(fit, fit.design); }

MatrixXd ols_covariance(const Pmm2Design& design, double sigma2) {
    const auto n = static_cast<double>(design.rows());
    const MatrixXd xtx = design.x.transpose() * design.x / n;
    return sigma2 * xtx.ldlt().solve(MatrixXd::Identity(xtx.rows(), xtx.cols()));
}

double re_theoretical(double gamma3, double gamma4) {
    const double num = 2.0 + gamma4;
    const double den = num - gamma3 * gamma3;
    if (!(den > 0.0)) {
        throw DomainError("re_theoretical: moment condition 2 + gamma4 > gamma3^2 violated");
    }
    return num / den;
}

double re_theoretical_alt(double gamma3, double gamma4) {
    const double num = 4.0 + 2.0 * gamma4;
    const double den = num - gamma3 * gamma3;
    if (!(den > 0.0)) {
        throw DomainError("re_theoretical_alt: moment condition 4 + 2 gamma4 > gamma3^2 violated");
    }
    return num / den;
}

namespace {

double log_det_spd(const MatrixXd& m, const char* which) {
    if (m.rows() != m.cols() || m.rows() == 0) throw DomainError(std::string("re_matrix: ") + which + " is not square");
    if (!m.isApprox(m.transpose(), 1e-8)) throw DomainError(std::string("re_matrix: ") + which + " is not symmetric");
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DomainError(std::string("re_matrix: ") + which + " is not positive definite");
    }
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

MatrixEfficiency re_matrix(const MatrixXd& sigma_ols, const MatrixXd& sigma_pmm2) {
    if (sigma_ols.rows() != sigma_pmm2.rows()) throw DomainError("re_matrix: dimension mismatch");
    const double ld_ols = log_det_spd(sigma_ols, "sigma_ols");
    const double ld_pmm = log_det_spd(sigma_pmm2, "sigma_pmm2");
    const auto k = static_cast<double>(sigma_ols.rows());
    return {std::exp((ld_ols - ld_pmm) / k), sigma_ols.trace() / sigma_pmm2.trace()};
}

}  // namespace pmm2

#include "pmm2/baseline.hpp"

#include "pmm2/arima.hpp"
#include "pmm2/errors.hpp"
#include "pmm2/moments.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmm2 {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd to_eigen(std::span<const double> v) {
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_not_constant(std::span<const double> z) {
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    if (*lo == *hi) throw RankError("series is constant; the estimating equations are singular");
}

void warn_on_uncentered(std::span<const double> z, bool intercept, BaselineFit& fit) {
    if (intercept) return;
    const RawMoments r = central_moments(z);
    if (std::abs(r.mean) > 0.5 * std::sqrt(r.mu2)) {
        fit.warnings.emplace_back(
            "series mean is large relative to its spread but no intercept was requested; "
            "consider demeaning or enabling the intercept");
    }
}

std::vector<double> css_residuals(std::span<const double> z, std::size_t p, std::size_t q,
                                  bool intercept, std::span<const double> coef) {
    return residuals(z, ModelSpec::from_coefficients(p, 0, q, coef, intercept));
}

double sum_sq(std::span<const double> e) {
    double s = 0.0;
    for (double v : e) s += v * v;
    return s;
}

MatrixXd residual_jacobian(std::span<const double> z, std::size_t p, std::size_t q, bool intercept,
                           const std::vector<double>& coef, const VectorXd& e0) {
    const auto k = static_cast<Index>(coef.size());
    MatrixXd jac(e0.size(), k);
    std::vector<double> shifted = coef;
    for (Index i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double h = 1e-6 * (1.0 + std::abs(coef[ui]));
        shifted[ui] = coef[ui] + h;
        const auto e = css_residuals(z, p, q, intercept, shifted);
        jac.col(i) = (to_eigen(e) - e0) / h;
        shifted[ui] = coef[ui];
    }
    return jac;
}

// sum_t e_t d2 e_t / (d coef_i d coef_j) by second differences.
MatrixXd residual_curvature(std::span<const double> z, std::size_t p, std::size_t q, bool intercept,
                            const std::vector<double>& coef, const VectorXd& e0) {
    const std::size_t k = coef.size();
    std::vector<double> h(k);
    std::vector<VectorXd> single(k);
    std::vector<double> shifted = coef;
    for (std::size_t i = 0; i < k; ++i) {
        h[i] = 1e-4 * (1.0 + std::abs(coef[i]));
        shifted[i] += h[i];
        single[i] = to_eigen(css_residuals(z, p, q, intercept, shifted));
        shifted[i] = coef[i];
    }
    MatrixXd s(static_cast<Index>(k), static_cast<Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            shifted[i] += h[i];
            shifted[j] += h[j];
            const VectorXd both = to_eigen(css_residuals(z, p, q, intercept, shifted));
            shifted[i] = coef[i];
            shifted[j] = coef[j];
            const double v = e0.dot(both - single[i] - single[j] + e0) / (h[i] * h[j]);
            s(static_cast<Index>(i), static_cast<Index>(j)) = v;
            s(static_cast<Index>(j), static_cast<Index>(i)) = v;
        }
    }
    return s;
}

std::vector<double> classical_se(const MatrixXd& jac, double sigma2) {
    const MatrixXd info = jac.transpose() * jac;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(info);
    const MatrixXd cov = sigma2 * cod.pseudoInverse();
    std::vector<double> se(static_cast<std::size_t>(cov.rows()));
    for (Index i = 0; i < cov.rows(); ++i) se[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, cov(i, i)));
    return se;
}

}  // namespace

BaselineFit ols_ar(std::span<const double> z, std::size_t p, bool intercept) {
    const std::size_t n = z.size();
    const std::size_t k = p + (intercept ? 1 : 0);
    if (k == 0) throw ParameterError("ols_ar: nothing to estimate (p = 0, no intercept)");
    if (n <= p || n - p < k) {
        throw LengthError("ols_ar: series of length " + std::to_string(n) + " is too short for p=" +
                          std::to_string(p));
    }
    check_not_constant(z);
    const auto rows = static_cast<Index>(n - p);
    MatrixXd x(rows, static_cast<Index>(k));
    VectorXd y(rows);
    for (Index r = 0; r < rows; ++r) {
        const std::size_t t = static_cast<std::size_t>(r) + p;
        for (std::size_t i = 1; i <= p; ++i) x(r, static_cast<Index>(i - 1)) = z[t - i];
        if (intercept) x(r, static_cast<Index>(p)) = 1.0;
        y(r) = z[t];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    if (qr.rank() < static_cast<Index>(k)) throw RankError("ols_ar: singular normal equations");
    const VectorXd beta = qr.solve(y);

    BaselineFit fit;
    fit.p = p;
    fit.q = 0;
    fit.intercept = intercept;
    fit.coef = to_std(beta);
    fit.residuals = css_residuals(z, p, 0, intercept, fit.coef);
    fit.objective = sum_sq(fit.residuals);
    fit.sigma2 = fit.objective / static_cast<double>(fit.residuals.size());
    fit.se = classical_se(x, fit.sigma2);
    fit.iterations = 0;
    fit.converged = true;
    warn_on_uncentered(z, intercept, fit);
    return fit;
}

double css_objective(std::span<const double> z, std::size_t p, std::size_t q, bool intercept,
                     std::span<const double> coef) {
    return sum_sq(css_residuals(z, p, q, intercept, coef));
}

BaselineFit css_estimate(std::span<const double> z, std::size_t p, std::size_t q, bool intercept,
                         std::optional<std::vector<double>> init, const CssConfig& cfg) {
    const std::size_t n = z.size();
    const std::size_t k = p + q + (intercept ? 1 : 0);
    if (k == 0) throw ParameterError("css_estimate: nothing to estimate");
    if (n < p + q + 10) {
        throw LengthError("css_estimate: series of length " + std::to_string(n) +
                          " is too short for the requested orders");
    }
    check_not_constant(z);

    std::vector<double> coef;
    if (init) {
        if (init->size() != k) throw ParameterError("css_estimate: init has wrong length");
        coef = *init;
    } else {
        coef.assign(k, 0.0);
        if (p > 0) {
            const BaselineFit ar = ols_ar(z, p, intercept);
            std::copy(ar.coef.begin(), ar.coef.begin() + static_cast<std::ptrdiff_t>(p), coef.begin());
            if (intercept) coef[k - 1] = ar.coef[p];
        } else if (intercept) {
            coef[k - 1] = central_moments(z).mean;
        }
    }
    project_coefficients(coef, p, q, cfg.admissibility_margin);

    auto residual_vec = [&](const std::vector<double>& c) { return to_eigen(css_residuals(z, p, q, intercept, c)); };

    VectorXd e = residual_vec(coef);
    double obj = e.squaredNorm();
    const double n_eff = static_cast<double>(e.size());

    BaselineFit fit;
    fit.p = p;
    fit.q = q;
    fit.intercept = intercept;

    bool converged = false;
    std::size_t iter = 0;
    MatrixXd jac;
    for (; iter < cfg.max_iterations; ++iter) {
        jac = residual_jacobian(z, p, q, intercept, coef, e);
        const VectorXd grad = jac.transpose() * e / n_eff;
        if (grad.lpNorm<Eigen::Infinity>() < cfg.gradient_tolerance) {
            converged = true;
            break;
        }
        // Full Newton step when the Hessian J'J + sum e_t d2e_t is positive
        // definite; the plain Gauss-Newton step otherwise. The curvature term
        // matters on flat surfaces near AR/MA root cancellation, where pure
        // Gauss-Newton only converges linearly.
        VectorXd step;
        const MatrixXd hessian = jac.transpose() * jac + residual_curvature(z, p, q, intercept, coef, e);
        Eigen::LLT<MatrixXd> llt(hessian);
        if (llt.info() == Eigen::Success) {
            step = llt.solve(-jac.transpose() * e);
        } else {
            step = jac.colPivHouseholderQr().solve(-e);
        }

        double alpha = 1.0;
        bool accepted = false;
        std::vector<double> trial(k);
        VectorXd e_trial;
        double obj_trial = std::numeric_limits<double>::infinity();
        for (std::size_t h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
            for (std::size_t i = 0; i < k; ++i) trial[i] = coef[i] + alpha * step(static_cast<Index>(i));
            project_coefficients(trial, p, q, cfg.admissibility_margin);
            e_trial = residual_vec(trial);
            obj_trial = e_trial.squaredNorm();
            if (std::isfinite(obj_trial) && obj_trial <= obj) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No descent direction left at this numerical resolution.
            converged = grad.lpNorm<Eigen::Infinity>() < std::sqrt(cfg.gradient_tolerance);
            break;
        }
        double rel_step = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            rel_step = std::max(rel_step, std::abs(trial[i] - coef[i]) / (1.0 + std::abs(coef[i])));
        }
        const double decrease = obj - obj_trial;
        coef = trial;
        e = e_trial;
        obj = obj_trial;
        if (rel_step < cfg.step_tolerance || decrease <= 1e-15 * (1.0 + obj)) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged && iter == cfg.max_iterations) fit.warnings.emplace_back("css: iteration limit reached");

    jac = residual_jacobian(z, p, q, intercept, coef, e);
    fit.coef = coef;
    fit.residuals = to_std(e);
    fit.objective = obj;
    fit.sigma2 = obj / n_eff;
    fit.se = classical_se(jac, fit.sigma2);
    fit.iterations = iter;
    fit.converged = converged;
    warn_on_uncentered(z, intercept, fit);
    return fit;
}

}  // namespace pmm2

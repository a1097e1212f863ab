#include "pmm2/pmm2.hpp"

#include "pmm2/arima.hpp"
#include "pmm2/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmm2 {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Pmm2Design build_design(std::span<const double> z, std::span<const double> baseline_residuals,
                        std::size_t p, std::size_t q, bool intercept) {
    const std::size_t m = std::max(p, q);
    const std::size_t n = z.size();
    if (n <= m) throw LengthError("build_design: series too short for the requested orders");
    if (baseline_residuals.size() != n - m) {
        throw LengthError("build_design: baseline residuals must have length n - max(p,q)");
    }
    const std::size_t k = p + q + (intercept ? 1 : 0);
    if (k == 0) throw ParameterError("build_design: empty design");

    // Residuals on the full time axis; presample entries are zero.
    std::vector<double> e(n, 0.0);
    std::copy(baseline_residuals.begin(), baseline_residuals.end(), e.begin() + static_cast<std::ptrdiff_t>(m));

    Pmm2Design design;
    design.m = m;
    design.p = p;
    design.q = q;
    design.intercept = intercept;
    const auto rows = static_cast<Index>(n - m);
    design.x.resize(rows, static_cast<Index>(k));
    design.response.resize(rows);
    for (Index r = 0; r < rows; ++r) {
        const std::size_t t = m + static_cast<std::size_t>(r);
        Index c = 0;
        for (std::size_t i = 1; i <= p; ++i) design.x(r, c++) = z[t - i];
        for (std::size_t j = 1; j <= q; ++j) design.x(r, c++) = e[t - j];
        if (intercept) design.x(r, c++) = 1.0;
        design.response(r) = z[t];
    }
    return design;
}

Pmm2Design build_design(std::span<const double> z, const BaselineFit& baseline) {
    return build_design(z, baseline.residuals, baseline.p, baseline.q, baseline.intercept);
}

VectorXd score_terms(const VectorXd& theta, const Pmm2Design& design, const MomentSet& mo) {
    const double c = mo.mu4 - mo.mu2 * mo.mu2;
    const VectorXd eta = design.x * theta;
    const auto& z = design.response;
    return (((c + 2.0 * mo.mu3 * eta.array()) * (z - eta).array()) -
            mo.mu3 * (z.array().square() - eta.array().square() - mo.mu2)) /
           mo.delta;
}

VectorXd score(const VectorXd& theta, const Pmm2Design& design, const MomentSet& mo) {
    return design.x.transpose() * score_terms(theta, design, mo);
}

VectorXd grouped_quadratic_form(const VectorXd& theta, const Pmm2Design& design, const MomentSet& mo) {
    const double c = mo.mu4 - mo.mu2 * mo.mu2;
    const VectorXd eta = design.x * theta;
    const auto z = design.response.array();
    const double a = mo.mu3;
    const Eigen::ArrayXd b = c - 2.0 * mo.mu3 * z;
    const Eigen::ArrayXd cc = mo.mu3 * z.square() - z * c - mo.mu2 * mo.mu3;
    const VectorXd bracket = (a * eta.array().square() + b * eta.array() + cc).matrix();
    return design.x.transpose() * bracket;
}

MatrixXd jacobian(const VectorXd& theta, const Pmm2Design& design, const MomentSet& mo) {
    const double c = mo.mu4 - mo.mu2 * mo.mu2;
    const VectorXd eta = design.x * theta;
    const VectorXd lambda = ((2.0 * mo.mu3 * (design.response - eta).array() - c) / mo.delta).matrix();
    return design.x.transpose() * lambda.asDiagonal() * design.x;
}

namespace {

void project(VectorXd& theta, const Pmm2Design& design, const NewtonConfig& cfg) {
    if (!cfg.project) return;
    project_coefficients(std::span<double>(theta.data(), static_cast<std::size_t>(theta.size())), design.p,
                         design.q, cfg.admissibility_margin);
}

double sup_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Pmm2Fit newton_solve(const VectorXd& init, const Pmm2Design& design, const MomentSet& moments,
                     const NewtonConfig& cfg) {
    if (init.size() != design.cols()) throw ParameterError("newton_solve: init has wrong length");
    Pmm2Fit out;
    out.p = design.p;
    out.q = design.q;
    out.intercept = design.intercept;
    out.moments = moments;

    VectorXd theta = init;
    project(theta, design, cfg);
    VectorXd g = score(theta, design, moments);
    double gnorm = sup_norm(g);
    VectorXd best = theta;
    double best_norm = gnorm;
    double last_step = std::numeric_limits<double>::infinity();

    std::size_t iter = 0;
    bool converged = false;
    while (true) {
        if (gnorm < cfg.score_tolerance && last_step < cfg.step_tolerance) {
            converged = true;
            break;
        }
        if (iter >= cfg.max_iterations) break;

        const MatrixXd jac = jacobian(theta, design, moments);
        Eigen::ColPivHouseholderQR<MatrixXd> qr(jac);
        VectorXd step;
        if (qr.rank() < jac.cols()) {
            out.singular_jacobian = true;
            step = jac.completeOrthogonalDecomposition().pseudoInverse() * g;
        } else {
            step = qr.solve(g);
        }

        double alpha = 1.0;
        VectorXd trial;
        VectorXd g_trial;
        bool accepted = false;
        for (std::size_t h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
            trial = theta - alpha * step;
            project(trial, design, cfg);
            g_trial = score(trial, design, moments);
            const double n_trial = sup_norm(g_trial);
            if (std::isfinite(n_trial) && n_trial <= gnorm) {
                accepted = true;
                break;
            }
        }
        ++iter;
        if (!accepted) break;
        last_step = sup_norm(trial - theta);
        theta = trial;
        g = g_trial;
        gnorm = sup_norm(g);
        if (gnorm < best_norm) {
            best = theta;
            best_norm = gnorm;
        }
    }

    if (!converged) {
        theta = best;
        gnorm = best_norm;
    }
    out.coef = to_std(theta);
    out.score_norm = gnorm;
    out.iterations = iter;
    out.converged = converged;
    return out;
}

namespace {

double max_moment_change(const MomentSet& a, const MomentSet& b) {
    return std::max({std::abs(a.mu2 - b.mu2), std::abs(a.mu3 - b.mu3), std::abs(a.mu4 - b.mu4)});
}

void use_baseline(Pmm2Fit& out, const BaselineFit& baseline, const Pmm2Design& design, const MomentSet& mo) {
    out.coef = baseline.coef;
    out.fallback_used = true;
    out.converged = baseline.converged;
    out.iterations = 0;
    const VectorXd theta = Eigen::Map<const VectorXd>(baseline.coef.data(), static_cast<Index>(baseline.coef.size()));
    out.score_norm = sup_norm(score(theta, design, mo));
}

}  // namespace

Pmm2Fit fit_from_baseline(std::span<const double> z, std::size_t d, const BaselineFit& baseline,
                          const FitConfig& cfg) {
    Pmm2Design design = build_design(z, baseline);

    Pmm2Fit out;
    out.p = baseline.p;
    out.d = d;
    out.q = baseline.q;
    out.intercept = baseline.intercept;
    out.baseline = baseline;
    out.warnings = baseline.warnings;

    MomentSet moments;
    bool degenerate = false;
    try {
        moments = sample_moments(baseline.residuals);
        degenerate = moments.delta <= 1e-12 * moments.mu2 * moments.mu2;
    } catch (const DegeneracyError&) {
        degenerate = true;
    }

    if (degenerate) {
        out.warnings.emplace_back("pmm2: degenerate residual moments (delta <= 0); baseline retained");
        out.coef = baseline.coef;
        out.fallback_used = true;
        out.converged = baseline.converged;
        const RawMoments r = central_moments(baseline.residuals);
        out.moments.mu2 = r.mu2;
        out.moments.mu3 = r.mu3;
        out.moments.mu4 = r.mu4;
        out.moments.delta = r.mu2 * (r.mu4 - r.mu2 * r.mu2) - r.mu3 * r.mu3;
        out.moments.gamma3 = r.mu2 > 0 ? r.mu3 / std::pow(r.mu2, 1.5) : 0.0;
        out.moments.gamma4 = r.mu2 > 0 ? r.mu4 / (r.mu2 * r.mu2) - 3.0 : 0.0;
    } else if (std::abs(moments.gamma3) < cfg.symmetry_threshold) {
        out.moments = moments;
        use_baseline(out, baseline, design, moments);
    } else {
        const VectorXd init =
            Eigen::Map<const VectorXd>(baseline.coef.data(), static_cast<Index>(baseline.coef.size()));
        Pmm2Fit solved = newton_solve(init, design, moments, cfg.newton);
        std::size_t outer = 1;
        if (cfg.adaptive) {
            for (; outer < cfg.adaptive_max_outer; ++outer) {
                const VectorXd theta =
                    Eigen::Map<const VectorXd>(solved.coef.data(), static_cast<Index>(solved.coef.size()));
                const VectorXd resid = design.response - design.x * theta;
                MomentSet updated;
                try {
                    updated = sample_moments(std::span<const double>(resid.data(), static_cast<std::size_t>(resid.size())));
                } catch (const DegeneracyError&) {
                    break;
                }
                if (std::abs(updated.gamma3) < cfg.symmetry_threshold) {
                    moments = updated;
                    solved.coef = baseline.coef;
                    solved.fallback_used = true;
                    break;
                }
                const double change = max_moment_change(updated, moments);
                moments = updated;
                solved = newton_solve(theta, design, moments, cfg.newton);
                if (change < cfg.adaptive_moment_tolerance) break;
            }
        }
        out.coef = solved.coef;
        out.moments = moments;
        out.score_norm = solved.score_norm;
        out.iterations = solved.iterations;
        out.converged = solved.converged;
        out.fallback_used = solved.fallback_used;
        out.singular_jacobian = solved.singular_jacobian;
        out.outer_iterations = outer;
        if (solved.singular_jacobian) out.warnings.emplace_back("pmm2: singular Jacobian, pseudo-inverse step used");
        if (!solved.converged) out.warnings.emplace_back("pmm2: Newton iteration did not converge");
    }

    ModelSpec model = ModelSpec::from_coefficients(out.p, d, out.q, out.coef, out.intercept);
    if (!is_admissible(model)) {
        model = project_to_admissible(model, cfg.newton.admissibility_margin);
        out.coef = model.coefficients();
        out.warnings.emplace_back("pmm2: final estimate projected onto the admissible region");
    }
    out.residuals = residuals(z, model);
    out.design = std::move(design);
    return out;
}

Pmm2Fit fit(std::span<const double> y, std::size_t p, std::size_t d, std::size_t q, const FitConfig& cfg) {
    if (y.size() <= d + p + q + 10) {
        throw LengthError("fit: series of length " + std::to_string(y.size()) + " is too short for ARIMA(" +
                          std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")");
    }
    const std::vector<double> z = difference(y, d);
    BaselineFit baseline;
    if (cfg.baseline == BaselineMethod::Ols) {
        if (q != 0) throw ParameterError("fit: the OLS baseline only applies to pure AR models (q = 0)");
        baseline = ols_ar(z, p, cfg.intercept);
    } else {
        baseline = css_estimate(z, p, q, cfg.intercept, std::nullopt, cfg.css);
    }
    return fit_from_baseline(z, d, baseline, cfg);
}

}  // namespace pmm2

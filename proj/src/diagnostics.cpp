#include "pmm2/diagnostics.hpp"

#include "pmm2/asymptotics.hpp"
#include "pmm2/errors.hpp"
#include "pmm2/moments.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace pmm2 {

double chi_square_sf(double x, double df) {
    if (!(df > 0.0)) throw DomainError("chi_square_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

TestResult ljung_box(std::span<const double> residuals, std::size_t lags, std::size_t fitted_params) {
    if (lags <= fitted_params) throw ParameterError("ljung_box: lags must exceed the fitted parameter count");
    const std::size_t n = residuals.size();
    if (n <= lags + 5) throw LengthError("ljung_box: series too short for the requested lags");
    const RawMoments mo = central_moments(residuals);
    const double denom = mo.mu2 * static_cast<double>(n);
    const double nd = static_cast<double>(n);
    double q = 0.0;
    if (denom > 0.0) {
        for (std::size_t h = 1; h <= lags; ++h) {
            double acc = 0.0;
            for (std::size_t t = h; t < n; ++t) acc += (residuals[t] - mo.mean) * (residuals[t - h] - mo.mean);
            const double r = acc / denom;
            q += r * r / (nd - static_cast<double>(h));
        }
        q *= nd * (nd + 2.0);
    }
    TestResult out;
    out.stat = q;
    out.df = lags - fitted_params;
    out.p_value = chi_square_sf(q, static_cast<double>(out.df));
    return out;
}

TestResult jarque_bera(std::size_t n, double gamma3, double gamma4) {
    TestResult out;
    out.df = 2;
    out.stat = static_cast<double>(n) * (gamma3 * gamma3 / 6.0 + gamma4 * gamma4 / 24.0);
    out.p_value = std::exp(-0.5 * out.stat);
    return out;
}

TestResult jarque_bera(std::span<const double> residuals) {
    if (residuals.size() < 8) throw LengthError("jarque_bera: need at least 8 observations");
    const RawMoments mo = central_moments(residuals);
    if (!(mo.mu2 > 0.0)) throw DegeneracyError("jarque_bera: zero variance");
    const double g3 = mo.mu3 / std::pow(mo.mu2, 1.5);
    const double g4 = mo.mu4 / (mo.mu2 * mo.mu2) - 3.0;
    return jarque_bera(residuals.size(), g3, g4);
}

InformationCriteria information_criteria(double rss, std::size_t n_eff, std::size_t k, bool post_hoc) {
    if (n_eff == 0 || !(rss > 0.0)) throw DomainError("information_criteria: residual variance must be positive");
    const double n = static_cast<double>(n_eff);
    const double sigma2 = rss / n;
    InformationCriteria ic;
    ic.log_likelihood = -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(sigma2) + 1.0);
    const double params = static_cast<double>(k + 1);
    ic.aic = -2.0 * ic.log_likelihood + 2.0 * params;
    ic.bic = -2.0 * ic.log_likelihood + params * std::log(n);
    ic.post_hoc = post_hoc;
    return ic;
}

InformationCriteria information_criteria(std::span<const double> residuals, std::size_t k, bool post_hoc) {
    double rss = 0.0;
    for (double e : residuals) rss += e * e;
    return information_criteria(rss, residuals.size(), k, post_hoc);
}

std::string_view to_string(Recommendation r) {
    switch (r) {
        case Recommendation::UseBaseline: return "use_baseline";
        case Recommendation::UsePMM2: return "use_pmm2";
        case Recommendation::UseBaselineSmallSample: return "use_baseline_small_sample";
    }
    return "unknown";
}

SelectionDecision decide(double gamma3, double gamma4, std::size_t n, const SelectionThresholds& th) {
    SelectionDecision out;
    out.gamma3_hat = gamma3;
    out.gamma4_hat = gamma4;
    out.n = n;
    if (std::abs(gamma3) < th.gamma3 && std::abs(gamma4) < th.gamma4) {
        out.recommendation = Recommendation::UseBaseline;
        out.rationale = "gaussian_innovations";
    } else if (n < th.min_n) {
        out.recommendation = Recommendation::UseBaselineSmallSample;
        out.rationale = "small_sample";
    } else {
        // Sample cumulants always satisfy 2 + g4 >= g3^2; equality only for
        // two-point laws, which never get here.
        out.re_theoretical = re_theoretical(gamma3, gamma4);
        if (out.re_theoretical > th.min_re) {
            out.recommendation = Recommendation::UsePMM2;
            out.rationale = "pmm2_advantage";
        } else {
            out.recommendation = Recommendation::UseBaseline;
            out.rationale = "insufficient_asymmetry";
        }
    }
    return out;
}

SelectionDecision select_method(std::span<const double> y, std::size_t p, std::size_t d, std::size_t q,
                                const SelectionThresholds& th, const FitConfig& cfg) {
    const std::vector<double> z = difference(y, d);
    BaselineFit base;
    if (cfg.baseline == BaselineMethod::Ols && q == 0) {
        base = ols_ar(z, p, cfg.intercept);
    } else {
        base = css_estimate(z, p, q, cfg.intercept, std::nullopt, cfg.css);
    }
    const RawMoments mo = central_moments(base.residuals);
    if (!(mo.mu2 > 0.0)) throw DegeneracyError("select_method: baseline residuals have zero variance");
    const double g3 = mo.mu3 / std::pow(mo.mu2, 1.5);
    const double g4 = mo.mu4 / (mo.mu2 * mo.mu2) - 3.0;
    return decide(g3, g4, y.size(), th);
}

namespace {

// Binomial coefficients of (1 - B)^d, i.e. delta^d y_t = sum_k w_k y_{t-k}.
std::vector<double> difference_weights(std::size_t d) {
    std::vector<double> w(d + 1, 0.0);
    w[0] = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = k + 1; j > 0; --j) w[j] -= w[j - 1];
    }
    return w;
}

double arma_mean(const ModelSpec& model, std::span<const double> z, std::span<const double> e, std::size_t t) {
    double v = model.intercept.value_or(0.0);
    for (std::size_t i = 1; i <= model.p; ++i) v += model.phi[i - 1] * (t >= i ? z[t - i] : 0.0);
    for (std::size_t j = 1; j <= model.q; ++j) v += model.theta[j - 1] * (t >= j ? e[t - j] : 0.0);
    return v;
}

// Turn a forecast of delta^d y_t into a forecast of y_t.
double undifference(double zhat, std::span<const double> y, std::size_t t, const std::vector<double>& w) {
    double v = zhat;
    for (std::size_t k = 1; k < w.size(); ++k) v -= w[k] * y[t - k];
    return v;
}

std::vector<double> full_residuals(std::span<const double> z, const ModelSpec& model) {
    const std::size_t m = model.presample();
    std::vector<double> e(z.size(), 0.0);
    if (z.size() > m) {
        const auto r = residuals(z, model);
        std::copy(r.begin(), r.end(), e.begin() + static_cast<std::ptrdiff_t>(m));
    }
    return e;
}

}  // namespace

double forecast_one_step(const ModelSpec& model, std::span<const double> history) {
    if (history.size() <= model.d + model.presample()) {
        throw LengthError("forecast_one_step: history does not cover the required lags");
    }
    const std::vector<double> z = difference(history, model.d);
    const std::vector<double> e = full_residuals(z, model);
    const double zhat = arma_mean(model, z, e, z.size());
    return undifference(zhat, history, history.size(), difference_weights(model.d));
}

std::vector<double> forecast_errors(std::span<const double> y, const ModelSpec& model, std::size_t start) {
    if (start <= model.d + model.presample() || start >= y.size()) {
        throw LengthError("forecast_errors: start must leave history and at least one target");
    }
    const std::vector<double> z = difference(y, model.d);
    const std::vector<double> e = full_residuals(z, model);
    const auto w = difference_weights(model.d);
    std::vector<double> out;
    out.reserve(y.size() - start);
    for (std::size_t t = start; t < y.size(); ++t) {
        // y index t corresponds to z index t - d.
        const double zhat = arma_mean(model, z, e, t - model.d);
        out.push_back(y[t] - undifference(zhat, y, t, w));
    }
    return out;
}

namespace {

void finish_score(ForecastScore& s) {
    double sq = 0.0;
    double ab = 0.0;
    for (double e : s.errors) {
        sq += e * e;
        ab += std::abs(e);
    }
    const double n = static_cast<double>(s.errors.size());
    s.rmse = std::sqrt(sq / n);
    s.mae = ab / n;
}

struct FittedPair {
    ModelSpec baseline;
    ModelSpec pmm2;
};

FittedPair fit_pair(std::span<const double> y, std::size_t p, std::size_t d, std::size_t q, const FitConfig& cfg) {
    const Pmm2Fit f = fit(y, p, d, q, cfg);
    return {ModelSpec::from_coefficients(p, d, q, f.baseline.coef, f.intercept),
            ModelSpec::from_coefficients(p, d, q, f.coef, f.intercept)};
}

}  // namespace

ValidationReport rolling_validate(std::span<const double> y, std::size_t p, std::size_t d, std::size_t q,
                                  const ValidationConfig& cfg) {
    const std::size_t n = y.size();
    ValidationReport rep;
    rep.baseline.estimator = cfg.fit.baseline == BaselineMethod::Ols ? "ols" : "css";
    rep.pmm2.estimator = "pmm2";

    if (cfg.mode == ValidationMode::Fixed) {
        if (!(cfg.split > 0.0 && cfg.split < 1.0)) throw ParameterError("rolling_validate: split must be in (0, 1)");
        const auto train = static_cast<std::size_t>(std::floor(cfg.split * static_cast<double>(n)));
        if (train >= n) throw LengthError("rolling_validate: split leaves no forecasts");
        const FittedPair models = fit_pair(y.subspan(0, train), p, d, q, cfg.fit);
        rep.first_forecast = train;
        rep.refits = 1;
        rep.baseline.errors = forecast_errors(y, models.baseline, train);
        rep.pmm2.errors = forecast_errors(y, models.pmm2, train);
        for (std::size_t t = train; t < n; ++t) {
            rep.baseline.forecasts.push_back(y[t] - rep.baseline.errors[t - train]);
            rep.pmm2.forecasts.push_back(y[t] - rep.pmm2.errors[t - train]);
        }
    } else {
        const std::size_t window = cfg.window;
        if (window == 0 || window >= n) {
            throw LengthError("rolling_validate: window must be positive and shorter than the series");
        }
        const std::size_t every = cfg.refit_every == 0 ? 1 : cfg.refit_every;
        rep.first_forecast = window;
        std::optional<FittedPair> models;
        for (std::size_t t = window; t < n; ++t) {
            if ((t - window) % every == 0) {
                ++rep.refits;
                try {
                    models = fit_pair(y.subspan(t - window, window), p, d, q, cfg.fit);
                } catch (const Error&) {
                    ++rep.failed_refits;
                    if (!models) throw;
                }
            }
            const auto history = y.subspan(0, t);
            const double fb = forecast_one_step(models->baseline, history);
            const double fp = forecast_one_step(models->pmm2, history);
            rep.baseline.forecasts.push_back(fb);
            rep.pmm2.forecasts.push_back(fp);
            rep.baseline.errors.push_back(y[t] - fb);
            rep.pmm2.errors.push_back(y[t] - fp);
        }
    }
    rep.n_forecasts = rep.baseline.errors.size();
    finish_score(rep.baseline);
    finish_score(rep.pmm2);
    if (rep.baseline.rmse > 0.0) rep.rmse_improvement_pct = 100.0 * (rep.baseline.rmse - rep.pmm2.rmse) / rep.baseline.rmse;
    if (rep.baseline.mae > 0.0) rep.mae_improvement_pct = 100.0 * (rep.baseline.mae - rep.pmm2.mae) / rep.baseline.mae;
    return rep;
}

}  // namespace pmm2

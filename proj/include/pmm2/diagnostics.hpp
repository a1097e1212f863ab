#pragma once

#include "pmm2/arima.hpp"
#include "pmm2/pmm2.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pmm2 {

struct TestResult {
    double stat = 0.0;
    double p_value = 1.0;
    std::size_t df = 0;
};

/// Upper tail P(X > x) of a chi-square law with `df` degrees of freedom.
double chi_square_sf(double x, double df);

/// Portmanteau Q = n(n+2) sum_{h=1..L} r_h^2 / (n-h) against
/// chi-square(L - fitted_params). Requires lags > fitted_params and
/// n > lags + 5 (LengthError / ParameterError otherwise).
TestResult ljung_box(std::span<const double> residuals, std::size_t lags = 10, std::size_t fitted_params = 0);

/// JB = n (g3^2 / 6 + g4^2 / 24) against chi-square(2).
TestResult jarque_bera(std::span<const double> residuals);
TestResult jarque_bera(std::size_t n, double gamma3, double gamma4);

struct InformationCriteria {
    double log_likelihood = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    /// Set when the likelihood is evaluated post hoc for an estimator that is
    /// not a likelihood maximizer (the PMM2 fit); compare with care.
    bool post_hoc = false;
};

/// Gaussian log-likelihood at sigma2 = RSS / n_eff, k coefficients plus the variance.
InformationCriteria information_criteria(double rss, std::size_t n_eff, std::size_t k, bool post_hoc = false);
InformationCriteria information_criteria(std::span<const double> residuals, std::size_t k, bool post_hoc = false);

enum class Recommendation { UseBaseline, UsePMM2, UseBaselineSmallSample };
std::string_view to_string(Recommendation r);

struct SelectionThresholds {
    double gamma3 = 0.5;
    double gamma4 = 1.0;
    std::size_t min_n = 200;
    double min_re = 1.2;
};

struct SelectionDecision {
    Recommendation recommendation = Recommendation::UseBaseline;
    double gamma3_hat = 0.0;
    double gamma4_hat = 0.0;
    /// 0 when the gaussian or small-sample branch short-circuits.
    double re_theoretical = 0.0;
    std::size_t n = 0;
    /// One of "gaussian_innovations", "small_sample", "pmm2_advantage",
    /// "insufficient_asymmetry".
    std::string rationale;
};

/// The decision rule alone, as a pure function of residual cumulants and n.
SelectionDecision decide(double gamma3, double gamma4, std::size_t n, const SelectionThresholds& th = {});

/// Baseline fit of ARIMA(p,d,q) on y, residual cumulants, then decide().
/// n is the length of y.
SelectionDecision select_method(std::span<const double> y, std::size_t p, std::size_t d, std::size_t q,
                                const SelectionThresholds& th = {}, const FitConfig& cfg = {});

/// Conditional mean of y_{T+1} given y_1..y_T under `model`, on the original
/// (undifferenced) scale.
double forecast_one_step(const ModelSpec& model, std::span<const double> history);

/// One-step errors y_t - forecast(y_1..y_{t-1}) for t = start..T-1 (0-based)
/// with a fixed model.
std::vector<double> forecast_errors(std::span<const double> y, const ModelSpec& model, std::size_t start);

enum class ValidationMode { Fixed, Rolling };

struct ValidationConfig {
    ValidationMode mode = ValidationMode::Fixed;
    /// Fixed mode: fraction of observations used for the single fit.
    double split = 0.8;
    /// Rolling mode: length of the estimation window.
    std::size_t window = 0;
    /// Rolling mode: refit every this many forecasts.
    std::size_t refit_every = 1;
    FitConfig fit;
};

struct ForecastScore {
    std::string estimator;
    double rmse = 0.0;
    double mae = 0.0;
    std::vector<double> forecasts;
    std::vector<double> errors;
};

struct ValidationReport {
    std::size_t first_forecast = 0;  // index into y of the first forecast target
    std::size_t n_forecasts = 0;
    std::size_t refits = 0;
    std::size_t failed_refits = 0;
    ForecastScore baseline;
    ForecastScore pmm2;
    /// 100 (baseline - pmm2) / baseline.
    double rmse_improvement_pct = 0.0;
    double mae_improvement_pct = 0.0;
};

/// Out-of-sample one-step forecasts from the baseline and PMM2 fits.
/// Throws ParameterError for a bad split and LengthError when the window or
/// training part leaves no forecasts or is too short to fit.
ValidationReport rolling_validate(std::span<const double> y, std::size_t p, std::size_t d, std::size_t q,
                                  const ValidationConfig& cfg = {});

}  // namespace pmm2

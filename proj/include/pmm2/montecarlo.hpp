#pragma once

#include "pmm2/arima.hpp"
#include "pmm2/distributions.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pmm2::mc {

enum class Estimator { Ols, Css, Pmm2 };
std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct DesignPoint {
    std::string name;
    ModelSpec model;
};

struct ExperimentConfig {
    std::vector<std::size_t> sample_sizes{100, 500};
    std::vector<DesignPoint> models;
    std::vector<InnovationSpec> innovations;
    std::size_t replications = 500;
    std::size_t bootstrap_resamples = 1000;
    std::uint64_t root_seed = 20240917;
    std::vector<Estimator> estimators{Estimator::Css, Estimator::Pmm2};
    /// Worker threads; 0 picks PMM2_THREADS from the environment, else the
    /// hardware concurrency. Has no effect on results.
    std::size_t threads = 0;
    std::size_t burn_in = kDefaultBurnIn;
    std::size_t ljung_box_lags = 10;
    /// Symmetry gate forwarded to the PMM2 fit.
    double symmetry_threshold = 0.1;

    /// Throws ConfigError (with a JSON pointer path) on the first violation.
    void validate() const;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// The four design points, four laws and {100, 500} sizes of the reference
/// study at 500 replications.
ExperimentConfig desk_scale_config();

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const { return lo <= v && v <= hi; }
};

struct ParameterSummary {
    Estimator estimator = Estimator::Css;
    std::string parameter;  // "phi1", "theta1", ...
    double truth = 0.0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    Interval bias_ci;
    double mse = 0.0;
    Interval mse_ci;
    double rmse = 0.0;
    double mae = 0.0;
    double coverage95 = 0.0;
    double mean_se = 0.0;
};

/// mse(baseline) / mse(pmm2) over paired replications.
struct EfficiencySummary {
    std::string parameter;
    Estimator baseline = Estimator::Css;
    double re = 0.0;
    Interval re_ci;
};

struct CellReport {
    std::string model_name;
    ModelSpec model;
    std::size_t sample_size = 0;
    InnovationSpec innovation;
    std::uint64_t seed = 0;

    std::size_t replications = 0;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    /// False when more than 1% of replications failed.
    bool valid = true;

    std::vector<ParameterSummary> parameters;
    std::vector<EfficiencySummary> efficiency;

    // PMM2 residual diagnostics over successful replications.
    double residual_gamma3_mean = 0.0;
    double residual_gamma3_sd = 0.0;
    double residual_gamma4_mean = 0.0;
    /// Share of replications whose fitted PMM2 residuals pass Ljung-Box at 5%.
    double ljung_box_pass_rate = 0.0;
    /// Same, for residuals at the true parameters.
    double ljung_box_pass_rate_true = 0.0;
    double fallback_rate = 0.0;
    double mean_newton_iterations = 0.0;
    /// Share of non-fallback PMM2 solves that converged within 10 iterations.
    double newton_within_10_rate = 0.0;

    /// Wall-clock seconds summed over replications, per estimator (OLS, CSS,
    /// PMM2 second stage). Not part of the deterministic report output.
    double seconds[3] = {0.0, 0.0, 0.0};
};

struct MCReport {
    ExperimentConfig config;
    std::vector<CellReport> cells;
    std::size_t total_replications = 0;
    std::size_t total_fits = 0;
};

/// Runs the full factorial design. Every replication r of a cell uses seed
/// split(split(root_seed, hash(cell label)), r), so results do not depend on
/// the thread count or scheduling.
MCReport run(const ExperimentConfig& config);

/// Runs a single cell. Exposed for tests and custom drivers.
CellReport run_cell(const ExperimentConfig& config, const DesignPoint& design, std::size_t sample_size,
                    const InnovationSpec& innovation);

struct ReCurveRow {
    std::string model_name;
    std::size_t sample_size = 0;
    InnovationSpec innovation;
    std::string parameter;
    double gamma3 = 0.0;
    double gamma4 = 0.0;
    double re_empirical = 0.0;
    double re_theoretical = 0.0;
};

/// One row per (cell, parameter) pairing empirical RE with the scalar
/// theoretical RE at the law's exact cumulants.
std::vector<ReCurveRow> re_curve(const MCReport& report);

/// CSV, one row per cell x estimator x parameter. Numbers use 10 significant
/// digits; the output is byte-stable for a fixed configuration.
void write_csv(const MCReport& report, std::ostream& os);
void write_re_curve_csv(const std::vector<ReCurveRow>& rows, std::ostream& os);
/// JSON summary; `include_timing` adds the (non-deterministic) timing block.
nlohmann::json to_json(const MCReport& report, bool include_timing = false);

/// Rounds to 10 significant digits, the precision used by every report.
double round10(double v);
std::string format10(double v);

}  // namespace pmm2::mc

// pmm2: command-line front end for the ARIMA PMM2 estimation library.
//
// Exit codes: 0 success, 1 data error, 2 usage or configuration error.

#include "pmm2/arima.hpp"
#include "pmm2/asymptotics.hpp"
#include "pmm2/baseline.hpp"
#include "pmm2/csv.hpp"
#include "pmm2/diagnostics.hpp"
#include "pmm2/distributions.hpp"
#include "pmm2/errors.hpp"
#include "pmm2/montecarlo.hpp"
#include "pmm2/pmm2.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using pmm2::mc::round10;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

// Raised for problems that are the caller's fault (bad flags, bad config).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Order {
    std::size_t p = 0, d = 0, q = 0;
};

Order parse_order(const std::string& text) {
    std::istringstream in(text);
    long p = -1, d = -1, q = -1;
    char c1 = 0, c2 = 0;
    if (!(in >> p >> c1 >> d >> c2 >> q) || c1 != ',' || c2 != ',' || p < 0 || d < 0 || q < 0 || !in.eof()) {
        throw UsageError("invalid --model '" + text + "'; expected p,d,q (e.g. 1,1,0)");
    }
    return {static_cast<std::size_t>(p), static_cast<std::size_t>(d), static_cast<std::size_t>(q)};
}

std::vector<std::string> param_names(std::size_t p, std::size_t q, bool intercept) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= p; ++i) names.push_back("phi" + std::to_string(i));
    for (std::size_t j = 1; j <= q; ++j) names.push_back("theta" + std::to_string(j));
    if (intercept) names.emplace_back("intercept");
    return names;
}

json named(const std::vector<std::string>& names, const std::vector<double>& values) {
    json j = json::object();
    for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) j[names[i]] = round10(values[i]);
    return j;
}

json test_json(const pmm2::TestResult& t) {
    return {{"stat", round10(t.stat)}, {"p_value", round10(t.p_value)}, {"df", t.df}};
}

json ic_json(const pmm2::InformationCriteria& ic) {
    return {{"log_likelihood", round10(ic.log_likelihood)},
            {"aic", round10(ic.aic)},
            {"bic", round10(ic.bic)},
            {"post_hoc", ic.post_hoc}};
}

json moments_json(const pmm2::MomentSet& m) {
    return {{"mu2", round10(m.mu2)},     {"mu3", round10(m.mu3)},       {"mu4", round10(m.mu4)},
            {"delta", round10(m.delta)}, {"gamma3", round10(m.gamma3)}, {"gamma4", round10(m.gamma4)}};
}

json residual_diagnostics(const std::vector<double>& resid, std::size_t k, std::size_t lags) {
    json j;
    const pmm2::RawMoments mo = pmm2::central_moments(resid);
    j["n"] = resid.size();
    if (mo.mu2 > 0.0) {
        j["gamma3"] = round10(mo.mu3 / std::pow(mo.mu2, 1.5));
        j["gamma4"] = round10(mo.mu4 / (mo.mu2 * mo.mu2) - 3.0);
    }
    if (lags > k && resid.size() > lags + 5) {
        j["ljung_box"] = test_json(pmm2::ljung_box(resid, lags, k));
    } else {
        j["ljung_box"] = nullptr;
    }
    j["jarque_bera"] = resid.size() >= 8 && mo.mu2 > 0.0 ? test_json(pmm2::jarque_bera(resid)) : json(nullptr);
    return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw UsageError("cannot write '" + out_path + "'");
        f << text;
    }
}

json input_json(const std::string& path, const pmm2::io::CsvSeries& s) {
    return {{"path", path},
            {"value_column", s.value_column},
            {"rows_read", s.rows_read},
            {"gaps_dropped", s.gaps_dropped},
            {"observations", s.values.size()},
            {"first_date", s.dates.empty() ? json(nullptr) : json(s.dates.front())},
            {"last_date", s.dates.empty() ? json(nullptr) : json(s.dates.back())}};
}

// ------------------------------------------------------------ simulate

struct SimulateArgs {
    std::string model = "1,1,0";
    std::vector<double> phi;
    std::vector<double> theta;
    double intercept = 0.0;
    std::string innovation = "gaussian";
    double param = 0.0;
    std::size_t n = 500;
    std::uint64_t seed = 1;
    std::size_t burn_in = pmm2::kDefaultBurnIn;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
    const Order o = parse_order(a.model);
    if (a.phi.size() != o.p) throw UsageError("--phi needs exactly p = " + std::to_string(o.p) + " values");
    if (a.theta.size() != o.q) throw UsageError("--theta needs exactly q = " + std::to_string(o.q) + " values");
    if (a.n <= o.d) throw UsageError("--n must exceed d");
    pmm2::InnovationSpec law = pmm2::default_innovation(pmm2::parse_innovation_kind(a.innovation));
    if (a.param != 0.0) law.param = a.param;
    law.validate();
    const auto model = pmm2::ModelSpec::make(o.d, a.phi, a.theta,
                                             a.intercept != 0.0 ? std::optional<double>(a.intercept) : std::nullopt);
    if (!pmm2::is_stationary(model)) throw pmm2::AdmissibilityError("model not stationary");
    if (!pmm2::is_invertible(model)) throw pmm2::AdmissibilityError("model not invertible");
    const auto eps = pmm2::sample(law, a.n - o.d + a.burn_in, a.seed);
    const auto y = pmm2::simulate(model, eps, a.burn_in);
    if (a.out.empty() || a.out == "-") {
        pmm2::io::write_series(std::cout, y);
    } else {
        std::ofstream f(a.out);
        if (!f) throw UsageError("cannot write '" + a.out + "'");
        pmm2::io::write_series(f, y);
    }
    return 0;
}

// ------------------------------------------------------------ fit

struct FitArgs {
    std::string input;
    std::string column;
    std::string model = "1,1,0";
    std::string method = "both";
    std::string baseline = "css";
    bool intercept = false;
    bool adaptive = false;
    double symmetry_threshold = 0.1;
    std::size_t lags = 10;
    bool no_timing = false;
    std::string out;
};

pmm2::io::CsvSeries load(const std::string& path, const std::string& column) {
    pmm2::io::CsvOptions opts;
    opts.column = column;
    return pmm2::io::read_series_file(path, opts);
}

json baseline_json(const pmm2::BaselineFit& b, const std::vector<std::string>& names, std::size_t lags,
                   double seconds, bool timing) {
    json j;
    j["coefficients"] = named(names, b.coef);
    j["se"] = named(names, b.se);
    j["sigma2"] = round10(b.sigma2);
    j["objective"] = round10(b.objective);
    j["iterations"] = b.iterations;
    j["converged"] = b.converged;
    j["n_eff"] = b.residuals.size();
    j["diagnostics"] = residual_diagnostics(b.residuals, b.coef.size(), lags);
    j["information_criteria"] = ic_json(pmm2::information_criteria(b.residuals, b.coef.size(), false));
    j["warnings"] = b.warnings;
    if (timing) j["timing_seconds"] = seconds;
    return j;
}

int cmd_fit(const FitArgs& a) {
    const Order o = parse_order(a.model);
    if (a.method != "ols" && a.method != "css" && a.method != "pmm2" && a.method != "both") {
        throw UsageError("--method must be one of ols, css, pmm2, both");
    }
    if (a.baseline != "css" && a.baseline != "ols") throw UsageError("--baseline must be css or ols");
    const bool ols_baseline = a.method == "ols" || (a.method != "css" && a.baseline == "ols");
    if (ols_baseline && o.q != 0) throw UsageError("the OLS estimator only applies to pure AR models (q = 0)");

    const auto series = load(a.input, a.column);
    const auto& y = series.values;
    if (y.size() <= o.d + o.p + o.q + 10) {
        throw pmm2::LengthError("series has " + std::to_string(y.size()) + " observations; too short for the model");
    }
    const auto names = param_names(o.p, o.q, a.intercept);
    const bool timing = !a.no_timing;

    json report;
    report["schema_version"] = 1;
    report["command"] = "fit";
    report["input"] = input_json(a.input, series);
    report["model"] = {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"intercept", a.intercept}};
    report["method"] = a.method;
    report["estimators"] = json::object();

    const auto z = pmm2::difference(y, o.d);
    pmm2::FitConfig cfg;
    cfg.baseline = ols_baseline ? pmm2::BaselineMethod::Ols : pmm2::BaselineMethod::Css;
    cfg.intercept = a.intercept;
    cfg.adaptive = a.adaptive;
    cfg.symmetry_threshold = a.symmetry_threshold;

    const auto t0 = std::chrono::steady_clock::now();
    const pmm2::BaselineFit base =
        ols_baseline ? pmm2::ols_ar(z, o.p, a.intercept) : pmm2::css_estimate(z, o.p, o.q, a.intercept);
    const double base_seconds = seconds_since(t0);
    const std::string base_name = ols_baseline ? "ols" : "css";

    if (a.method != "pmm2") report["estimators"][base_name] = baseline_json(base, names, a.lags, base_seconds, timing);

    bool converged = base.converged;
    if (a.method == "pmm2" || a.method == "both") {
        const auto t1 = std::chrono::steady_clock::now();
        const pmm2::Pmm2Fit f = pmm2::fit_from_baseline(z, o.d, base, cfg);
        const pmm2::CovarianceReport cov = pmm2::sandwich(f);
        const double pmm_seconds = base_seconds + seconds_since(t1);
        converged = f.converged;

        json j;
        j["baseline"] = base_name;
        j["coefficients"] = named(names, f.coef);
        j["se"] = named(names, std::vector<double>(cov.se.data(), cov.se.data() + cov.se.size()));
        j["moments"] = moments_json(f.moments);
        j["fallback_used"] = f.fallback_used;
        j["converged"] = f.converged;
        j["iterations"] = f.iterations;
        j["score_norm"] = round10(f.score_norm);
        j["covariance_regularized"] = cov.regularized;
        j["n_eff"] = f.residuals.size();
        j["diagnostics"] = residual_diagnostics(f.residuals, f.coef.size(), a.lags);
        j["information_criteria"] = ic_json(pmm2::information_criteria(f.residuals, f.coef.size(), true));
        j["information_criteria_caveat"] =
            "post-hoc Gaussian likelihood; PMM2 is not a likelihood estimator, compare with care";
        try {
            j["re_theoretical"] = round10(pmm2::re_theoretical(f.moments.gamma3, f.moments.gamma4));
        } catch (const pmm2::DomainError&) {
            j["re_theoretical"] = nullptr;
        }
        j["re_formula"] = "(2+g4)/((2+g4)-g3^2)";
        j["warnings"] = f.warnings;
        if (timing) j["timing_seconds"] = pmm_seconds;
        report["estimators"]["pmm2"] = j;

        if (a.method == "both" && !f.fallback_used) {
            try {
                const auto eff = pmm2::re_matrix(pmm2::ols_covariance(f.design, f.moments.mu2), cov.sigma);
                report["efficiency"] = {{"re_det", round10(eff.re_det)}, {"re_trace", round10(eff.re_trace)}};
            } catch (const pmm2::DomainError& e) {
                report["efficiency"] = {{"error", e.what()}};
            }
        }
    }
    report["converged"] = converged;
    emit(report, a.out);
    return 0;
}

// ------------------------------------------------------------ select

struct SelectArgs {
    std::string input;
    std::string column;
    std::string model = "1,1,0";
    bool intercept = false;
    std::string out;
};

int cmd_select(const SelectArgs& a) {
    const Order o = parse_order(a.model);
    const auto series = load(a.input, a.column);
    pmm2::FitConfig cfg;
    cfg.intercept = a.intercept;
    const auto d = pmm2::select_method(series.values, o.p, o.d, o.q, {}, cfg);
    json j;
    j["schema_version"] = 1;
    j["command"] = "select";
    j["input"] = input_json(a.input, series);
    j["recommendation"] = std::string(pmm2::to_string(d.recommendation));
    j["rationale"] = d.rationale;
    j["gamma3"] = round10(d.gamma3_hat);
    j["gamma4"] = round10(d.gamma4_hat);
    j["re_theoretical"] = d.re_theoretical > 0.0 ? json(round10(d.re_theoretical)) : json(nullptr);
    j["n"] = d.n;
    emit(j, a.out);
    return 0;
}

// ------------------------------------------------------------ mc

struct McArgs {
    std::string config;
    std::string out = "mc_out";
    std::size_t threads = 0;
};

int cmd_mc(const McArgs& a) {
    std::ifstream in(a.config);
    if (!in) throw UsageError("cannot open config '" + a.config + "'");
    json raw;
    try {
        raw = json::parse(in);
    } catch (const json::parse_error& e) {
        throw pmm2::ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    auto config = pmm2::mc::ExperimentConfig::from_json(raw);
    if (a.threads > 0) config.threads = a.threads;

    const auto report = pmm2::mc::run(config);
    std::filesystem::create_directories(a.out);
    const std::filesystem::path dir(a.out);
    {
        std::ofstream f(dir / "report.csv");
        pmm2::mc::write_csv(report, f);
    }
    {
        std::ofstream f(dir / "re_curve.csv");
        pmm2::mc::write_re_curve_csv(pmm2::mc::re_curve(report), f);
    }
    {
        std::ofstream f(dir / "summary.json");
        f << pmm2::mc::to_json(report, false).dump(2) << "\n";
    }
    {
        json t = json::array();
        for (const auto& c : report.cells) {
            t.push_back({{"model", c.model_name},
                         {"n", c.sample_size},
                         {"innovation", c.innovation.label()},
                         {"seconds", {{"ols", c.seconds[0]}, {"css", c.seconds[1]}, {"pmm2", c.seconds[2]}}}});
        }
        std::ofstream f(dir / "timing.json");
        f << t.dump(2) << "\n";
    }
    std::size_t invalid = 0;
    for (const auto& c : report.cells) invalid += c.valid ? 0 : 1;
    std::cerr << "pmm2 mc: " << report.cells.size() << " cells, " << report.total_replications
              << " replications, " << report.total_fits << " fits";
    if (invalid > 0) std::cerr << ", " << invalid << " invalid cell(s)";
    std::cerr << "; wrote " << dir.string() << "\n";
    return 0;
}

// ------------------------------------------------------------ validate

struct ValidateArgs {
    std::string input;
    std::string column;
    std::string model = "1,1,0";
    std::string mode = "fixed";
    double split = 0.8;
    std::size_t window = 0;
    std::size_t refit_every = 1;
    bool intercept = false;
    std::string out;
};

json score_json(const pmm2::ForecastScore& s) {
    json errors = json::array();
    json forecasts = json::array();
    for (double e : s.errors) errors.push_back(round10(e));
    for (double f : s.forecasts) forecasts.push_back(round10(f));
    return {{"rmse", round10(s.rmse)}, {"mae", round10(s.mae)}, {"forecasts", forecasts}, {"errors", errors}};
}

int cmd_validate(const ValidateArgs& a) {
    const Order o = parse_order(a.model);
    pmm2::ValidationConfig cfg;
    if (a.mode == "fixed") {
        cfg.mode = pmm2::ValidationMode::Fixed;
        if (!(a.split > 0.0 && a.split < 1.0)) throw UsageError("--split must be in (0, 1)");
    } else if (a.mode == "rolling") {
        cfg.mode = pmm2::ValidationMode::Rolling;
        if (a.window == 0) throw UsageError("--window is required in rolling mode");
    } else {
        throw UsageError("--mode must be fixed or rolling");
    }
    cfg.split = a.split;
    cfg.window = a.window;
    cfg.refit_every = a.refit_every;
    cfg.fit.intercept = a.intercept;

    const auto series = load(a.input, a.column);
    if (cfg.mode == pmm2::ValidationMode::Rolling && a.window >= series.values.size()) {
        throw UsageError("--window " + std::to_string(a.window) + " is not shorter than the series (" +
                         std::to_string(series.values.size()) + " observations)");
    }
    const auto rep = pmm2::rolling_validate(series.values, o.p, o.d, o.q, cfg);

    json j;
    j["schema_version"] = 1;
    j["command"] = "validate";
    j["input"] = input_json(a.input, series);
    j["model"] = {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"intercept", a.intercept}};
    j["mode"] = a.mode;
    if (cfg.mode == pmm2::ValidationMode::Fixed) {
        j["split"] = a.split;
    } else {
        j["window"] = a.window;
        j["refit_every"] = a.refit_every;
    }
    j["first_forecast_index"] = rep.first_forecast;
    j["n_forecasts"] = rep.n_forecasts;
    j["refits"] = rep.refits;
    j["failed_refits"] = rep.failed_refits;
    j["estimators"] = {{rep.baseline.estimator, score_json(rep.baseline)}, {"pmm2", score_json(rep.pmm2)}};
    j["improvement_pct"] = {{"rmse", round10(rep.rmse_improvement_pct)}, {"mae", round10(rep.mae_improvement_pct)}};
    emit(j, a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PMM2 estimation for ARIMA models with non-Gaussian innovations"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate an ARIMA series and write it as CSV");
    s->add_option("--model", sim.model, "Orders p,d,q")->default_val("1,1,0");
    s->add_option("--phi", sim.phi, "AR coefficients")->delimiter(',');
    s->add_option("--theta", sim.theta, "MA coefficients")->delimiter(',');
    s->add_option("--intercept", sim.intercept, "Constant term of the differenced series");
    s->add_option("--innovation", sim.innovation, "gaussian | gamma | lognormal | chisq")->default_val("gaussian");
    s->add_option("--param", sim.param, "Law shape (gamma k, lognormal sdlog, chisq df); 0 keeps the default");
    s->add_option("--n", sim.n, "Number of observations")->default_val(500);
    s->add_option("--seed", sim.seed, "Random seed")->default_val(1);
    s->add_option("--burn-in", sim.burn_in, "Discarded warm-up draws")->default_val(pmm2::kDefaultBurnIn);
    s->add_option("--out", sim.out, "Output file (default stdout)");

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit an ARIMA model and print a JSON report");
    f->add_option("--input", fit.input, "CSV file")->required();
    f->add_option("--column", fit.column, "Value column name (default: last column)");
    f->add_option("--model", fit.model, "Orders p,d,q")->default_val("1,1,0");
    f->add_option("--method", fit.method, "ols | css | pmm2 | both")->default_val("both");
    f->add_option("--baseline", fit.baseline, "First stage for pmm2: css | ols")->default_val("css");
    f->add_flag("--intercept", fit.intercept, "Estimate a constant");
    f->add_flag("--adaptive", fit.adaptive, "Re-estimate moments from second-stage residuals");
    f->add_option("--symmetry-threshold", fit.symmetry_threshold, "Keep the baseline when |gamma3| is below this")
        ->default_val(0.1);
    f->add_option("--lags", fit.lags, "Ljung-Box lags")->default_val(10);
    f->add_flag("--no-timing", fit.no_timing, "Omit wall-clock timings (byte-stable output)");
    f->add_option("--out", fit.out, "Output file (default stdout)");

    SelectArgs sel;
    auto* se = app.add_subcommand("select", "Recommend the baseline or PMM2 from residual cumulants");
    se->add_option("--input", sel.input, "CSV file")->required();
    se->add_option("--column", sel.column, "Value column name");
    se->add_option("--model", sel.model, "Orders p,d,q")->default_val("1,1,0");
    se->add_flag("--intercept", sel.intercept, "Estimate a constant");
    se->add_option("--out", sel.out, "Output file (default stdout)");

    McArgs mc;
    auto* m = app.add_subcommand("mc", "Run a Monte Carlo experiment");
    m->add_option("--config", mc.config, "Experiment config (JSON)")->required();
    m->add_option("--out", mc.out, "Output directory")->default_val("mc_out");
    m->add_option("--threads", mc.threads, "Worker threads (0: PMM2_THREADS or all cores)")->default_val(0);

    ValidateArgs val;
    auto* v = app.add_subcommand("validate", "Out-of-sample one-step forecast comparison");
    v->add_option("--input", val.input, "CSV file")->required();
    v->add_option("--column", val.column, "Value column name");
    v->add_option("--model", val.model, "Orders p,d,q")->default_val("1,1,0");
    v->add_option("--mode", val.mode, "fixed | rolling")->default_val("fixed");
    v->add_option("--split", val.split, "Training fraction in fixed mode")->default_val(0.8);
    v->add_option("--window", val.window, "Estimation window in rolling mode");
    v->add_option("--refit-every", val.refit_every, "Refit cadence in rolling mode")->default_val(1);
    v->add_flag("--intercept", val.intercept, "Estimate a constant");
    v->add_option("--out", val.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*s) return cmd_simulate(sim);
        if (*f) return cmd_fit(fit);
        if (*se) return cmd_select(sel);
        if (*m) return cmd_mc(mc);
        if (*v) return cmd_validate(val);
    } catch (const UsageError& e) {
        std::cerr << "pmm2: " << e.what() << "\n";
        return kExitUsage;
    } catch (const pmm2::ConfigError& e) {
        std::cerr << "pmm2: config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const pmm2::AdmissibilityError& e) {
        std::cerr << "pmm2: " << e.what() << "\n";
        return kExitUsage;
    } catch (const pmm2::ParameterError& e) {
        std::cerr << "pmm2: " << e.what() << "\n";
        return kExitUsage;
    } catch (const pmm2::Error& e) {
        std::cerr << "pmm2: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "pmm2: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

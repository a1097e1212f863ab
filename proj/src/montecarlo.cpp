#include "pmm2/montecarlo.hpp"

#include "pmm2/asymptotics.hpp"
#include "pmm2/baseline.hpp"
#include "pmm2/diagnostics.hpp"
#include "pmm2/errors.hpp"
#include "pmm2/pmm2.hpp"
#include "pmm2/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

namespace pmm2::mc {

using nlohmann::json;

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::Ols: return "ols";
        case Estimator::Css: return "css";
        case Estimator::Pmm2: return "pmm2";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "ols") return Estimator::Ols;
    if (name == "css") return Estimator::Css;
    if (name == "pmm2") return Estimator::Pmm2;
    throw ParameterError("unknown estimator '" + std::string(name) + "'");
}

double round10(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::strtod(buf, nullptr);
}

std::string format10(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
    if (sample_sizes.empty()) throw ConfigError("/sample_sizes", "at least one sample size is required");
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        if (sample_sizes[i] < 30) throw ConfigError("/sample_sizes/" + std::to_string(i), "sample size must be >= 30");
    }
    if (models.empty()) throw ConfigError("/models", "at least one model is required");
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& m = models[i].model;
        const std::string path = "/models/" + std::to_string(i);
        if (m.p + m.q == 0) throw ConfigError(path, "model has no ARMA coefficients to estimate");
        if (!is_stationary(m)) throw ConfigError(path + "/phi", "model not stationary");
        if (!is_invertible(m)) throw ConfigError(path + "/theta", "model not invertible");
        for (std::size_t n : sample_sizes) {
            if (n <= m.d + m.p + m.q + 10) throw ConfigError(path, "model too large for the smallest sample size");
        }
    }
    if (innovations.empty()) throw ConfigError("/innovations", "at least one innovation law is required");
    for (std::size_t i = 0; i < innovations.size(); ++i) {
        try {
            innovations[i].validate();
        } catch (const ParameterError& e) {
            throw ConfigError("/innovations/" + std::to_string(i), e.what());
        }
    }
    if (replications < 30) throw ConfigError("/replications", "at least 30 replications are required");
    if (bootstrap_resamples < 1) throw ConfigError("/bootstrap_resamples", "must be positive");
    if (estimators.empty()) throw ConfigError("/estimators", "at least one estimator is required");
    if (ljung_box_lags < 2) throw ConfigError("/ljung_box_lags", "must be at least 2");
}

namespace {

template <class T>
T get_field(const json& j, const char* key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path + "/" + key, std::string("wrong type: ") + e.what());
    }
}

InnovationSpec parse_innovation(const json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return default_innovation(parse_innovation_kind(j.get<std::string>()));
        } catch (const ParameterError& e) {
            throw ConfigError(path, e.what());
        }
    }
    if (!j.is_object() || !j.contains("kind")) throw ConfigError(path, "expected {\"kind\": ..., \"params\": {...}}");
    InnovationSpec spec;
    try {
        spec = default_innovation(parse_innovation_kind(j.at("kind").get<std::string>()));
    } catch (const std::exception& e) {
        throw ConfigError(path + "/kind", e.what());
    }
    if (j.contains("params")) {
        const json& params = j.at("params");
        if (!params.is_object()) throw ConfigError(path + "/params", "expected an object");
        static constexpr const char* keys[] = {"shape", "k", "sdlog", "sigma", "df", "nu"};
        for (const char* key : keys) {
            if (params.contains(key)) spec.param = get_field<double>(params, key, path + "/params", spec.param);
        }
    }
    try {
        spec.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(path + "/params", e.what());
    }
    return spec;
}

DesignPoint parse_model(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    std::size_t d = 0;
    if (j.contains("order")) {
        const auto order = get_field<std::vector<std::size_t>>(j, "order", path, {});
        if (order.size() != 3) throw ConfigError(path + "/order", "expected [p, d, q]");
        d = order[1];
    } else {
        d = get_field<std::size_t>(j, "d", path, 0);
    }
    auto phi = get_field<std::vector<double>>(j, "phi", path, {});
    auto theta = get_field<std::vector<double>>(j, "theta", path, {});
    if (j.contains("order")) {
        const auto order = j.at("order").get<std::vector<std::size_t>>();
        if (order[0] != phi.size()) throw ConfigError(path + "/phi", "length must equal p");
        if (order[2] != theta.size()) throw ConfigError(path + "/theta", "length must equal q");
    }
    DesignPoint dp;
    dp.model = ModelSpec::make(d, std::move(phi), std::move(theta));
    dp.name = get_field<std::string>(j, "name", path,
                                     "ARIMA(" + std::to_string(dp.model.p) + "," + std::to_string(d) + "," +
                                         std::to_string(dp.model.q) + ")");
    return dp;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
    static constexpr const char* known[] = {"schema_version", "sample_sizes", "models", "innovations",
                                            "replications", "bootstrap_resamples", "root_seed", "estimators",
                                            "threads", "burn_in", "ljung_box_lags", "symmetry_threshold"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("/" + key, "unknown field");
        }
    }
    const auto version = get_field<int>(j, "schema_version", "", 1);
    if (version != 1) throw ConfigError("/schema_version", "unsupported schema version");

    ExperimentConfig c;
    c.sample_sizes = get_field<std::vector<std::size_t>>(j, "sample_sizes", "", c.sample_sizes);
    if (!j.contains("models") || !j.at("models").is_array()) throw ConfigError("/models", "required array");
    for (std::size_t i = 0; i < j.at("models").size(); ++i) {
        c.models.push_back(parse_model(j.at("models")[i], "/models/" + std::to_string(i)));
    }
    if (!j.contains("innovations") || !j.at("innovations").is_array()) {
        throw ConfigError("/innovations", "required array");
    }
    for (std::size_t i = 0; i < j.at("innovations").size(); ++i) {
        c.innovations.push_back(parse_innovation(j.at("innovations")[i], "/innovations/" + std::to_string(i)));
    }
    c.replications = get_field<std::size_t>(j, "replications", "", c.replications);
    c.bootstrap_resamples = get_field<std::size_t>(j, "bootstrap_resamples", "", c.bootstrap_resamples);
    c.root_seed = get_field<std::uint64_t>(j, "root_seed", "", c.root_seed);
    if (j.contains("estimators")) {
        const auto names = get_field<std::vector<std::string>>(j, "estimators", "", {});
        c.estimators.clear();
        for (std::size_t i = 0; i < names.size(); ++i) {
            try {
                c.estimators.push_back(parse_estimator(names[i]));
            } catch (const ParameterError& e) {
                throw ConfigError("/estimators/" + std::to_string(i), e.what());
            }
        }
    }
    c.threads = get_field<std::size_t>(j, "threads", "", c.threads);
    c.burn_in = get_field<std::size_t>(j, "burn_in", "", c.burn_in);
    c.ljung_box_lags = get_field<std::size_t>(j, "ljung_box_lags", "", c.ljung_box_lags);
    c.symmetry_threshold = get_field<double>(j, "symmetry_threshold", "", c.symmetry_threshold);
    c.validate();
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["sample_sizes"] = sample_sizes;
    j["models"] = json::array();
    for (const auto& m : models) {
        j["models"].push_back({{"name", m.name},
                               {"order", {m.model.p, m.model.d, m.model.q}},
                               {"phi", m.model.phi},
                               {"theta", m.model.theta}});
    }
    j["innovations"] = json::array();
    for (const auto& s : innovations) {
        json params = json::object();
        switch (s.kind) {
            case InnovationKind::Gaussian: break;
            case InnovationKind::Gamma: params["shape"] = s.param; break;
            case InnovationKind::Lognormal: params["sdlog"] = s.param; break;
            case InnovationKind::ChiSquare: params["df"] = s.param; break;
        }
        j["innovations"].push_back({{"kind", std::string(pmm2::to_string(s.kind))}, {"params", params}});
    }
    j["replications"] = replications;
    j["bootstrap_resamples"] = bootstrap_resamples;
    j["root_seed"] = root_seed;
    j["estimators"] = json::array();
    for (auto e : estimators) j["estimators"].push_back(std::string(to_string(e)));
    j["burn_in"] = burn_in;
    j["ljung_box_lags"] = ljung_box_lags;
    j["symmetry_threshold"] = symmetry_threshold;
    return j;
}

ExperimentConfig desk_scale_config() {
    ExperimentConfig c;
    c.sample_sizes = {100, 500};
    c.models = {{"ARIMA(1,1,0)", ModelSpec::make(1, {0.7}, {})},
                {"ARIMA(0,1,1)", ModelSpec::make(1, {}, {-0.5})},
                {"ARIMA(1,1,1)", ModelSpec::make(1, {0.6}, {-0.4})},
                {"ARIMA(2,1,0)", ModelSpec::make(1, {0.5, -0.25}, {})}};
    c.innovations = {InnovationSpec::gaussian(), InnovationSpec::gamma(2.0), InnovationSpec::lognormal(0.4),
                     InnovationSpec::chi_square(3.0)};
    c.replications = 500;
    c.bootstrap_resamples = 1000;
    return c;
}

// ---------------------------------------------------------------- engine

namespace {

constexpr std::size_t kEstimatorCount = 3;

std::size_t slot(Estimator e) { return static_cast<std::size_t>(e); }

struct EstimatorDraw {
    bool present = false;
    std::vector<double> estimate;
    std::vector<double> se;
    double seconds = 0.0;
};

struct Replication {
    bool ok = false;
    EstimatorDraw draws[kEstimatorCount];
    double gamma3 = 0.0;
    double gamma4 = 0.0;
    bool lb_pass = false;
    bool lb_pass_true = false;
    bool fallback = false;
    std::size_t newton_iterations = 0;
};

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PMM2_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool has(const ExperimentConfig& c, Estimator e) {
    return std::find(c.estimators.begin(), c.estimators.end(), e) != c.estimators.end();
}

Replication replicate(const ExperimentConfig& config, const ModelSpec& truth, std::size_t n,
                      const InnovationSpec& law, std::uint64_t seed) {
    Replication rep;
    const std::size_t k = truth.p + truth.q;
    const auto eps = sample(law, n - truth.d + config.burn_in, seed);
    const auto y = simulate(truth, eps, config.burn_in);
    const auto z = difference(y, truth.d);

    if (has(config, Estimator::Ols) && truth.q == 0) {
        const auto t0 = std::chrono::steady_clock::now();
        const BaselineFit f = ols_ar(z, truth.p, false);
        auto& d = rep.draws[slot(Estimator::Ols)];
        d.seconds = seconds_since(t0);
        if (!f.converged) return rep;
        d.present = true;
        d.estimate = f.coef;
        d.se = f.se;
    }

    const bool want_css = has(config, Estimator::Css);
    const bool want_pmm2 = has(config, Estimator::Pmm2);
    if (want_css || want_pmm2) {
        const auto t0 = std::chrono::steady_clock::now();
        const BaselineFit css = css_estimate(z, truth.p, truth.q, false);
        const double css_seconds = seconds_since(t0);
        if (!css.converged) return rep;
        if (want_css) {
            auto& d = rep.draws[slot(Estimator::Css)];
            d.present = true;
            d.estimate = css.coef;
            d.se = css.se;
            d.seconds = css_seconds;
        }
        if (want_pmm2) {
            FitConfig cfg;
            cfg.symmetry_threshold = config.symmetry_threshold;
            const auto t1 = std::chrono::steady_clock::now();
            const Pmm2Fit f = fit_from_baseline(z, truth.d, css, cfg);
            const CovarianceReport cov = sandwich(f);
            auto& d = rep.draws[slot(Estimator::Pmm2)];
            d.seconds = seconds_since(t1);
            if (!f.converged) return rep;
            d.present = true;
            d.estimate = f.coef;
            d.se.assign(cov.se.data(), cov.se.data() + cov.se.size());
            rep.fallback = f.fallback_used;
            rep.newton_iterations = f.iterations;
            const RawMoments mo = central_moments(f.residuals);
            rep.gamma3 = mo.mu3 / std::pow(mo.mu2, 1.5);
            rep.gamma4 = mo.mu4 / (mo.mu2 * mo.mu2) - 3.0;
            rep.lb_pass = ljung_box(f.residuals, config.ljung_box_lags, k).p_value > 0.05;
        }
    }
    const auto true_resid = residuals(z, truth);
    rep.lb_pass_true = ljung_box(true_resid, config.ljung_box_lags, 0).p_value > 0.05;
    rep.ok = true;
    return rep;
}

std::vector<std::string> parameter_names(const ModelSpec& m) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= m.p; ++i) names.push_back("phi" + std::to_string(i));
    for (std::size_t j = 1; j <= m.q; ++j) names.push_back("theta" + std::to_string(j));
    return names;
}

Interval percentile_interval(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto at = [&](double prob) {
        // Linear interpolation between order statistics (type 7).
        const double h = prob * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {at(0.025), at(0.975)};
}

}  // namespace

CellReport run_cell(const ExperimentConfig& config, const DesignPoint& design, std::size_t n,
                    const InnovationSpec& law) {
    CellReport cell;
    cell.model_name = design.name;
    cell.model = design.model;
    cell.sample_size = n;
    cell.innovation = law;
    cell.replications = config.replications;
    const std::string label = design.model.label() + "|N=" + std::to_string(n) + "|" + law.label();
    cell.seed = rng::split(config.root_seed, rng::hash_label(label));

    std::vector<Replication> reps(config.replications);
    parallel_for(config.replications, resolve_threads(config.threads), [&](std::size_t r) {
        try {
            reps[r] = replicate(config, design.model, n, law, rng::split(cell.seed, r));
        } catch (const Error&) {
            reps[r].ok = false;
        }
    });

    std::vector<std::size_t> ok;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        if (reps[r].ok) ok.push_back(r);
        for (std::size_t e = 0; e < kEstimatorCount; ++e) cell.seconds[e] += reps[r].draws[e].seconds;
    }
    cell.succeeded = ok.size();
    cell.failed = reps.size() - ok.size();
    cell.valid = static_cast<double>(cell.failed) <= 0.01 * static_cast<double>(reps.size());
    if (ok.empty()) {
        cell.valid = false;
        return cell;
    }

    const auto names = parameter_names(design.model);
    const auto truth = design.model.coefficients();
    const std::size_t k = names.size();
    const double n_ok = static_cast<double>(ok.size());

    // Per-replication squared and signed errors, laid out [estimator][param][rep].
    std::vector<Estimator> active;
    for (Estimator e : {Estimator::Ols, Estimator::Css, Estimator::Pmm2}) {
        if (has(config, e) && reps[ok.front()].draws[slot(e)].present) active.push_back(e);
    }

    auto err = [&](Estimator e, std::size_t j, std::size_t r) {
        return reps[r].draws[slot(e)].estimate[j] - truth[j];
    };

    auto rng_boot = rng::make_engine(rng::split(cell.seed, 0xb0075ULL));
    std::uniform_int_distribution<std::size_t> pick(0, ok.size() - 1);
    std::vector<std::vector<std::size_t>> resamples(config.bootstrap_resamples, std::vector<std::size_t>(ok.size()));
    for (auto& idx : resamples) {
        for (auto& i : idx) i = ok[pick(rng_boot)];
    }

    auto mse_over = [&](Estimator e, std::size_t j, const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (std::size_t r : idx) s += err(e, j, r) * err(e, j, r);
        return s / static_cast<double>(idx.size());
    };
    auto bias_over = [&](Estimator e, std::size_t j, const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (std::size_t r : idx) s += err(e, j, r);
        return s / static_cast<double>(idx.size());
    };

    for (Estimator e : active) {
        for (std::size_t j = 0; j < k; ++j) {
            ParameterSummary ps;
            ps.estimator = e;
            ps.parameter = names[j];
            ps.truth = truth[j];
            double sum_est = 0.0, sum_abs = 0.0, sum_se = 0.0;
            std::size_t covered = 0;
            for (std::size_t r : ok) {
                const auto& d = reps[r].draws[slot(e)];
                const double er = d.estimate[j] - truth[j];
                sum_est += d.estimate[j];
                sum_abs += std::abs(er);
                sum_se += d.se[j];
                if (std::abs(er) <= 1.96 * d.se[j]) ++covered;
            }
            ps.mean_estimate = sum_est / n_ok;
            ps.bias = bias_over(e, j, ok);
            ps.mse = mse_over(e, j, ok);
            ps.rmse = std::sqrt(ps.mse);
            ps.mae = sum_abs / n_ok;
            ps.mean_se = sum_se / n_ok;
            ps.coverage95 = static_cast<double>(covered) / n_ok;
            std::vector<double> boot_bias, boot_mse;
            boot_bias.reserve(resamples.size());
            boot_mse.reserve(resamples.size());
            for (const auto& idx : resamples) {
                boot_bias.push_back(bias_over(e, j, idx));
                boot_mse.push_back(mse_over(e, j, idx));
            }
            ps.bias_ci = percentile_interval(std::move(boot_bias));
            ps.mse_ci = percentile_interval(std::move(boot_mse));
            cell.parameters.push_back(ps);
        }
    }

    const bool have_pmm2 = std::find(active.begin(), active.end(), Estimator::Pmm2) != active.end();
    std::optional<Estimator> base;
    if (std::find(active.begin(), active.end(), Estimator::Css) != active.end()) {
        base = Estimator::Css;
    } else if (std::find(active.begin(), active.end(), Estimator::Ols) != active.end()) {
        base = Estimator::Ols;
    }
    if (have_pmm2 && base) {
        for (std::size_t j = 0; j < k; ++j) {
            EfficiencySummary es;
            es.parameter = names[j];
            es.baseline = *base;
            es.re = mse_over(*base, j, ok) / mse_over(Estimator::Pmm2, j, ok);
            std::vector<double> boot;
            boot.reserve(resamples.size());
            for (const auto& idx : resamples) {
                boot.push_back(mse_over(*base, j, idx) / mse_over(Estimator::Pmm2, j, idx));
            }
            es.re_ci = percentile_interval(std::move(boot));
            cell.efficiency.push_back(es);
        }
    }

    if (have_pmm2) {
        double g3 = 0.0, g3sq = 0.0, g4 = 0.0, lb = 0.0, fb = 0.0, iters = 0.0;
        std::size_t solved = 0, fast = 0;
        for (std::size_t r : ok) {
            g3 += reps[r].gamma3;
            g3sq += reps[r].gamma3 * reps[r].gamma3;
            g4 += reps[r].gamma4;
            lb += reps[r].lb_pass ? 1.0 : 0.0;
            fb += reps[r].fallback ? 1.0 : 0.0;
            if (!reps[r].fallback) {
                ++solved;
                iters += static_cast<double>(reps[r].newton_iterations);
                if (reps[r].newton_iterations <= 10) ++fast;
            }
        }
        cell.residual_gamma3_mean = g3 / n_ok;
        cell.residual_gamma3_sd = ok.size() > 1 ? std::sqrt(std::max(0.0, (g3sq - g3 * g3 / n_ok) / (n_ok - 1.0))) : 0.0;
        cell.residual_gamma4_mean = g4 / n_ok;
        cell.ljung_box_pass_rate = lb / n_ok;
        cell.fallback_rate = fb / n_ok;
        cell.mean_newton_iterations = solved > 0 ? iters / static_cast<double>(solved) : 0.0;
        cell.newton_within_10_rate = solved > 0 ? static_cast<double>(fast) / static_cast<double>(solved) : 1.0;
    }
    double lbt = 0.0;
    for (std::size_t r : ok) lbt += reps[r].lb_pass_true ? 1.0 : 0.0;
    cell.ljung_box_pass_rate_true = lbt / n_ok;
    return cell;
}

MCReport run(const ExperimentConfig& config) {
    config.validate();
    MCReport report;
    report.config = config;
    for (const auto& design : config.models) {
        for (std::size_t n : config.sample_sizes) {
            for (const auto& law : config.innovations) {
                report.cells.push_back(run_cell(config, design, n, law));
                report.total_replications += config.replications;
                std::size_t fits = 0;
                for (Estimator e : config.estimators) {
                    if (e != Estimator::Ols || design.model.q == 0) ++fits;
                }
                report.total_fits += fits * config.replications;
            }
        }
    }
    return report;
}

std::vector<ReCurveRow> re_curve(const MCReport& report) {
    std::vector<ReCurveRow> rows;
    for (const auto& cell : report.cells) {
        const MomentSet th = theoretical_cumulants(cell.innovation);
        for (const auto& es : cell.efficiency) {
            ReCurveRow row;
            row.model_name = cell.model_name;
            row.sample_size = cell.sample_size;
            row.innovation = cell.innovation;
            row.parameter = es.parameter;
            row.gamma3 = th.gamma3;
            row.gamma4 = th.gamma4;
            row.re_empirical = es.re;
            row.re_theoretical = re_theoretical(th.gamma3, th.gamma4);
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------- output

void write_csv(const MCReport& report, std::ostream& os) {
    os << "model,n,innovation,estimator,parameter,truth,mean_estimate,bias,bias_lo,bias_hi,mse,mse_lo,mse_hi,"
          "rmse,mae,coverage95,mean_se,re,re_lo,re_hi,succeeded,failed,valid\n";
    for (const auto& cell : report.cells) {
        for (const auto& ps : cell.parameters) {
            std::string re = "", re_lo = "", re_hi = "";
            for (const auto& es : cell.efficiency) {
                if (es.parameter != ps.parameter) continue;
                if (ps.estimator == Estimator::Pmm2) {
                    re = format10(es.re);
                    re_lo = format10(es.re_ci.lo);
                    re_hi = format10(es.re_ci.hi);
                } else if (ps.estimator == es.baseline) {
                    re = re_lo = re_hi = "1";
                }
            }
            os << '"' << cell.model_name << "\"," << cell.sample_size << ',' << cell.innovation.label() << ','
               << to_string(ps.estimator) << ',' << ps.parameter << ',' << format10(ps.truth) << ','
               << format10(ps.mean_estimate) << ',' << format10(ps.bias) << ',' << format10(ps.bias_ci.lo) << ','
               << format10(ps.bias_ci.hi) << ',' << format10(ps.mse) << ',' << format10(ps.mse_ci.lo) << ','
               << format10(ps.mse_ci.hi) << ',' << format10(ps.rmse) << ',' << format10(ps.mae) << ','
               << format10(ps.coverage95) << ',' << format10(ps.mean_se) << ',' << re << ',' << re_lo << ','
               << re_hi << ',' << cell.succeeded << ',' << cell.failed << ',' << (cell.valid ? "true" : "false")
               << '\n';
        }
    }
}

void write_re_curve_csv(const std::vector<ReCurveRow>& rows, std::ostream& os) {
    os << "model,n,innovation,parameter,gamma3,gamma4,re_empirical,re_theoretical\n";
    for (const auto& r : rows) {
        os << '"' << r.model_name << "\"," << r.sample_size << ',' << r.innovation.label() << ',' << r.parameter
           << ',' << format10(r.gamma3) << ',' << format10(r.gamma4) << ',' << format10(r.re_empirical) << ','
           << format10(r.re_theoretical) << '\n';
    }
}

namespace {

json interval_json(const Interval& iv) { return json::array({round10(iv.lo), round10(iv.hi)}); }

}  // namespace

json to_json(const MCReport& report, bool include_timing) {
    json j;
    j["schema_version"] = 1;
    j["config"] = report.config.to_json();
    j["total_replications"] = report.total_replications;
    j["total_fits"] = report.total_fits;
    j["cells"] = json::array();
    for (const auto& cell : report.cells) {
        json c;
        c["model"] = cell.model_name;
        c["order"] = {cell.model.p, cell.model.d, cell.model.q};
        c["n"] = cell.sample_size;
        c["innovation"] = cell.innovation.label();
        c["seed"] = cell.seed;
        c["replications"] = cell.replications;
        c["succeeded"] = cell.succeeded;
        c["failed"] = cell.failed;
        c["valid"] = cell.valid;
        c["parameters"] = json::array();
        for (const auto& ps : cell.parameters) {
            c["parameters"].push_back({{"estimator", std::string(to_string(ps.estimator))},
                                       {"parameter", ps.parameter},
                                       {"truth", round10(ps.truth)},
                                       {"mean_estimate", round10(ps.mean_estimate)},
                                       {"bias", round10(ps.bias)},
                                       {"bias_ci", interval_json(ps.bias_ci)},
                                       {"mse", round10(ps.mse)},
                                       {"mse_ci", interval_json(ps.mse_ci)},
                                       {"rmse", round10(ps.rmse)},
                                       {"mae", round10(ps.mae)},
                                       {"coverage95", round10(ps.coverage95)},
                                       {"mean_se", round10(ps.mean_se)}});
        }
        c["efficiency"] = json::array();
        for (const auto& es : cell.efficiency) {
            c["efficiency"].push_back({{"parameter", es.parameter},
                                       {"baseline", std::string(to_string(es.baseline))},
                                       {"re", round10(es.re)},
                                       {"re_ci", interval_json(es.re_ci)}});
        }
        c["residuals"] = {{"gamma3_mean", round10(cell.residual_gamma3_mean)},
                          {"gamma3_sd", round10(cell.residual_gamma3_sd)},
                          {"gamma4_mean", round10(cell.residual_gamma4_mean)},
                          {"ljung_box_pass_rate", round10(cell.ljung_box_pass_rate)},
                          {"ljung_box_pass_rate_true", round10(cell.ljung_box_pass_rate_true)}};
        c["pmm2"] = {{"fallback_rate", round10(cell.fallback_rate)},
                     {"mean_newton_iterations", round10(cell.mean_newton_iterations)},
                     {"newton_within_10_rate", round10(cell.newton_within_10_rate)}};
        if (include_timing) {
            c["timing_seconds"] = {{"ols", round10(cell.seconds[0])},
                                   {"css", round10(cell.seconds[1])},
                                   {"pmm2", round10(cell.seconds[2])}};
        }
        j["cells"].push_back(std::move(c));
    }
    return j;
}

}  // namespace pmm2::mc

#include "pmm2/arima.hpp"
#include "pmm2/asymptotics.hpp"
#include "pmm2/baseline.hpp"
#include "pmm2/diagnostics.hpp"
#include "pmm2/distributions.hpp"
#include "pmm2/errors.hpp"
#include "pmm2/montecarlo.hpp"
#include "pmm2/pmm2.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace py::literals;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw pmm2::ParameterError("expected a one-dimensional series");
    return {a.data(), a.data() + a.size()};
}

pmm2::InnovationSpec make_law(const std::string& kind, std::optional<double> param) {
    auto spec = pmm2::default_innovation(pmm2::parse_innovation_kind(kind));
    if (param) spec.param = *param;
    spec.validate();
    return spec;
}

pmm2::ModelSpec make_model(std::size_t d, std::vector<double> phi, std::vector<double> theta,
                           std::optional<double> intercept) {
    return pmm2::ModelSpec::make(d, std::move(phi), std::move(theta), intercept);
}

py::dict moments_dict(const pmm2::MomentSet& m) {
    return py::dict("mu2"_a = m.mu2, "mu3"_a = m.mu3, "mu4"_a = m.mu4, "delta"_a = m.delta, "gamma3"_a = m.gamma3,
                    "gamma4"_a = m.gamma4);
}

py::dict baseline_dict(const pmm2::BaselineFit& b) {
    return py::dict("coef"_a = to_array(b.coef), "se"_a = to_array(b.se), "sigma2"_a = b.sigma2,
                    "residuals"_a = to_array(b.residuals), "objective"_a = b.objective,
                    "iterations"_a = b.iterations, "converged"_a = b.converged, "warnings"_a = b.warnings);
}

py::dict test_dict(const pmm2::TestResult& t) {
    return py::dict("stat"_a = t.stat, "p_value"_a = t.p_value, "df"_a = t.df);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "PMM2 estimation for ARIMA models with non-Gaussian innovations";

    // Translators run most recent first, so the base class goes in first.
    static py::exception<pmm2::Error> base_exc(m, "Pmm2Error", PyExc_ValueError);
    py::register_exception<pmm2::LengthError>(m, "LengthError", base_exc.ptr());
    py::register_exception<pmm2::ParameterError>(m, "ParameterError", base_exc.ptr());
    py::register_exception<pmm2::AdmissibilityError>(m, "AdmissibilityError", base_exc.ptr());
    py::register_exception<pmm2::RankError>(m, "RankError", base_exc.ptr());
    py::register_exception<pmm2::DegeneracyError>(m, "DegeneracyError", base_exc.ptr());
    py::register_exception<pmm2::DomainError>(m, "DomainError", base_exc.ptr());
    py::register_exception<pmm2::DataError>(m, "DataError", base_exc.ptr());

    m.def(
        "sample",
        [](const std::string& kind, std::size_t n, std::uint64_t seed, std::optional<double> param) {
            return to_array(pmm2::sample(make_law(kind, param), n, seed));
        },
        "kind"_a, "n"_a, "seed"_a, "param"_a = py::none(),
        "Standardized i.i.d. innovations from 'gaussian', 'gamma', 'lognormal' or 'chisq'.");

    m.def(
        "theoretical_cumulants",
        [](const std::string& kind, std::optional<double> param) {
            return moments_dict(pmm2::theoretical_cumulants(make_law(kind, param)));
        },
        "kind"_a, "param"_a = py::none());

    m.def(
        "difference", [](py::array_t<double> y, std::size_t d) { return to_array(pmm2::difference(to_vector(y), d)); },
        "y"_a, "d"_a = 1);
    m.def(
        "integrate", [](py::array_t<double> z, std::size_t d) { return to_array(pmm2::integrate(to_vector(z), d)); },
        "z"_a, "d"_a = 1);

    m.def(
        "simulate",
        [](py::array_t<double> innovations, std::vector<double> phi, std::vector<double> theta, std::size_t d,
           std::size_t burn_in, std::optional<double> intercept) {
            return to_array(pmm2::simulate(make_model(d, std::move(phi), std::move(theta), intercept),
                                           to_vector(innovations), burn_in));
        },
        "innovations"_a, "phi"_a = std::vector<double>{}, "theta"_a = std::vector<double>{}, "d"_a = 0,
        "burn_in"_a = pmm2::kDefaultBurnIn, "intercept"_a = py::none());

    m.def(
        "residuals",
        [](py::array_t<double> z, std::vector<double> phi, std::vector<double> theta, std::optional<double> c) {
            return to_array(pmm2::residuals(to_vector(z), make_model(0, std::move(phi), std::move(theta), c)));
        },
        "z"_a, "phi"_a = std::vector<double>{}, "theta"_a = std::vector<double>{}, "intercept"_a = py::none());

    m.def(
        "is_admissible",
        [](std::vector<double> phi, std::vector<double> theta) {
            return pmm2::is_admissible(make_model(0, std::move(phi), std::move(theta), std::nullopt));
        },
        "phi"_a = std::vector<double>{}, "theta"_a = std::vector<double>{});

    m.def(
        "project_to_admissible",
        [](std::vector<double> phi, std::vector<double> theta, double margin) {
            const auto out = pmm2::project_to_admissible(make_model(0, std::move(phi), std::move(theta), std::nullopt),
                                                         margin);
            return py::make_tuple(out.phi, out.theta);
        },
        "phi"_a = std::vector<double>{}, "theta"_a = std::vector<double>{},
        "margin"_a = pmm2::kDefaultAdmissibilityMargin);

    m.def(
        "sample_moments",
        [](py::array_t<double> r) { return moments_dict(pmm2::sample_moments(to_vector(r))); }, "residuals"_a);

    m.def(
        "ols_ar",
        [](py::array_t<double> z, std::size_t p, bool intercept) {
            return baseline_dict(pmm2::ols_ar(to_vector(z), p, intercept));
        },
        "z"_a, "p"_a, "intercept"_a = false);

    m.def(
        "css",
        [](py::array_t<double> z, std::size_t p, std::size_t q, bool intercept) {
            return baseline_dict(pmm2::css_estimate(to_vector(z), p, q, intercept));
        },
        "z"_a, "p"_a, "q"_a, "intercept"_a = false, "Conditional sum of squares on a differenced series.");

    m.def(
        "fit",
        [](py::array_t<double> y, std::size_t p, std::size_t d, std::size_t q, bool intercept,
           const std::string& baseline, bool adaptive, double symmetry_threshold) {
            pmm2::FitConfig cfg;
            cfg.intercept = intercept;
            cfg.adaptive = adaptive;
            cfg.symmetry_threshold = symmetry_threshold;
            if (baseline == "ols") {
                cfg.baseline = pmm2::BaselineMethod::Ols;
            } else if (baseline != "css") {
                throw pmm2::ParameterError("baseline must be 'css' or 'ols'");
            }
            const auto f = pmm2::fit(to_vector(y), p, d, q, cfg);
            py::object se = py::none();
            if (f.converged && !f.fallback_used) {
                const auto cov = pmm2::sandwich(f);
                se = to_array(std::vector<double>(cov.se.data(), cov.se.data() + cov.se.size()));
            }
            return py::dict("coef"_a = to_array(f.coef), "se"_a = se, "moments"_a = moments_dict(f.moments),
                            "converged"_a = f.converged, "fallback_used"_a = f.fallback_used,
                            "iterations"_a = f.iterations, "score_norm"_a = f.score_norm,
                            "residuals"_a = to_array(f.residuals), "baseline"_a = baseline_dict(f.baseline),
                            "warnings"_a = f.warnings);
        },
        "y"_a, "p"_a, "d"_a, "q"_a, "intercept"_a = false, "baseline"_a = "css", "adaptive"_a = false,
        "symmetry_threshold"_a = 0.1,
        "Two-stage PMM2 fit of ARIMA(p,d,q) on an undifferenced series. Coefficients are (phi, theta, intercept?).");

    m.def("re_theoretical", &pmm2::re_theoretical, "gamma3"_a, "gamma4"_a);
    m.def("re_theoretical_alt", &pmm2::re_theoretical_alt, "gamma3"_a, "gamma4"_a);
    m.def(
        "re_matrix",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
            const auto e = pmm2::re_matrix(a, b);
            return py::dict("re_det"_a = e.re_det, "re_trace"_a = e.re_trace);
        },
        "sigma_ols"_a, "sigma_pmm2"_a);

    m.def(
        "ljung_box",
        [](py::array_t<double> r, std::size_t lags, std::size_t fitted) {
            return test_dict(pmm2::ljung_box(to_vector(r), lags, fitted));
        },
        "residuals"_a, "lags"_a = 10, "fitted_params"_a = 0);
    m.def(
        "jarque_bera", [](py::array_t<double> r) { return test_dict(pmm2::jarque_bera(to_vector(r))); },
        "residuals"_a);

    m.def(
        "decide",
        [](double g3, double g4, std::size_t n) {
            const auto d = pmm2::decide(g3, g4, n);
            return py::dict("recommendation"_a = std::string(pmm2::to_string(d.recommendation)),
                            "rationale"_a = d.rationale, "re_theoretical"_a = d.re_theoretical);
        },
        "gamma3"_a, "gamma4"_a, "n"_a);

    m.def(
        "select_method",
        [](py::array_t<double> y, std::size_t p, std::size_t d, std::size_t q) {
            const auto s = pmm2::select_method(to_vector(y), p, d, q);
            return py::dict("recommendation"_a = std::string(pmm2::to_string(s.recommendation)),
                            "rationale"_a = s.rationale, "gamma3"_a = s.gamma3_hat, "gamma4"_a = s.gamma4_hat,
                            "re_theoretical"_a = s.re_theoretical);
        },
        "y"_a, "p"_a, "d"_a, "q"_a);

    m.def(
        "validate",
        [](py::array_t<double> y, std::size_t p, std::size_t d, std::size_t q, double split, std::size_t window,
           std::size_t refit_every) {
            pmm2::ValidationConfig cfg;
            cfg.split = split;
            if (window > 0) {
                cfg.mode = pmm2::ValidationMode::Rolling;
                cfg.window = window;
                cfg.refit_every = refit_every;
            }
            const auto r = pmm2::rolling_validate(to_vector(y), p, d, q, cfg);
            return py::dict("n_forecasts"_a = r.n_forecasts, "baseline_rmse"_a = r.baseline.rmse,
                            "pmm2_rmse"_a = r.pmm2.rmse, "baseline_mae"_a = r.baseline.mae,
                            "pmm2_mae"_a = r.pmm2.mae, "rmse_improvement_pct"_a = r.rmse_improvement_pct,
                            "mae_improvement_pct"_a = r.mae_improvement_pct,
                            "baseline_errors"_a = to_array(r.baseline.errors),
                            "pmm2_errors"_a = to_array(r.pmm2.errors));
        },
        "y"_a, "p"_a, "d"_a, "q"_a, "split"_a = 0.8, "window"_a = 0, "refit_every"_a = 1,
        "One-step forecast comparison; a nonzero window selects rolling mode.");

    m.def(
        "run_monte_carlo",
        [](const std::string& config_json, std::size_t threads) {
            auto cfg = pmm2::mc::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
            if (threads > 0) cfg.threads = threads;
            pmm2::mc::MCReport rep;
            {
                py::gil_scoped_release release;
                rep = pmm2::mc::run(cfg);
            }
            std::ostringstream csv;
            pmm2::mc::write_csv(rep, csv);
            return py::make_tuple(csv.str(), pmm2::mc::to_json(rep).dump());
        },
        "config_json"_a, "threads"_a = 0, "Runs an experiment; returns (report CSV, summary JSON).");
}

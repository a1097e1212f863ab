#include "pmm2/arima.hpp"
#include "pmm2/asymptotics.hpp"
#include "pmm2/errors.hpp"
#include "pmm2/montecarlo.hpp"
#include "pmm2/rng.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <set>
#include <sstream>

using namespace pmm2;
using namespace pmm2::mc;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.sample_sizes = {120};
    c.models = {{"ar1", ModelSpec::make(1, {0.7}, {})}, {"arma11", ModelSpec::make(1, {0.6}, {-0.4})}};
    c.innovations = {InnovationSpec::gaussian(), InnovationSpec::gamma()};
    c.replications = 40;
    c.bootstrap_resamples = 200;
    c.root_seed = 77;
    c.estimators = {Estimator::Ols, Estimator::Css, Estimator::Pmm2};
    return c;
}

std::string csv_of(const MCReport& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

std::string config_error_path(const json& j) {
    try {
        ExperimentConfig::from_json(j);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<none>";
}

}  // namespace

TEST_CASE("seed tree gives distinct streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t cell = 0; cell < 20; ++cell) {
        const auto cs = rng::split(1, cell);
        for (std::uint64_t r = 0; r < 500; ++r) seen.insert(rng::split(cs, r));
    }
    CHECK(seen.size() == 20 * 500);
    CHECK(rng::split(1, 2) != rng::split(2, 1));
    CHECK(rng::hash_label("gamma(2)") != rng::hash_label("gamma(3)"));
}

TEST_CASE("config validation reports the failing path") {
    const json base = small_config().to_json();
    CHECK(config_error_path(base) == "<none>");

    json j = base;
    j["replications"] = 10;
    CHECK(config_error_path(j) == "/replications");
    j = base;
    j["bogus"] = true;
    CHECK(config_error_path(j) == "/bogus");
    j = base;
    j["models"][1]["phi"] = {1.3};
    CHECK(config_error_path(j) == "/models/1/phi");
    j = base;
    j["models"][0]["theta"] = {0.2, 0.1};
    CHECK(config_error_path(j) == "/models/0/theta");
    j = base;
    j["innovations"][1] = {{"kind", "gamma"}, {"params", {{"shape", -1.0}}}};
    CHECK(config_error_path(j).rfind("/innovations/1", 0) == 0);
    j = base;
    j["schema_version"] = 2;
    CHECK(config_error_path(j) == "/schema_version");
    j = base;
    j["estimators"] = {"css", "mle"};
    CHECK(config_error_path(j) == "/estimators/1");
    j = base;
    j["replications"] = "many";
    CHECK(config_error_path(j) == "/replications");
    CHECK(config_error_path(json::array()) == "");
}

TEST_CASE("config JSON round trip") {
    const auto c = small_config();
    const auto back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    const auto d = desk_scale_config();
    CHECK(ExperimentConfig::from_json(d.to_json()).to_json() == d.to_json());
    CHECK(d.models.size() == 4);
    CHECK(d.innovations.size() == 4);

    const json brief = {{"models", {{{"order", {1, 1, 0}}, {"phi", {0.7}}}}}, {"innovations", {"gamma", "chisq"}}};
    const auto e = ExperimentConfig::from_json(brief);
    CHECK(e.innovations[0] == InnovationSpec::gamma(2.0));
    CHECK(e.innovations[1] == InnovationSpec::chi_square(3.0));
    CHECK(e.replications == 500);
}

TEST_CASE("report is deterministic across worker counts") {
    auto c = small_config();
    c.threads = 1;
    const auto a = run(c);
    c.threads = 3;
    const auto b = run(c);
    CHECK(csv_of(a) == csv_of(b));
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(a.total_replications == 2 * 2 * 40);
}

TEST_CASE("report invariants") {
    const auto r = run(small_config());
    REQUIRE(r.cells.size() == 4);
    for (const auto& cell : r.cells) {
        CAPTURE(cell.model_name);
        CAPTURE(cell.innovation.label());
        CHECK(cell.succeeded + cell.failed == cell.replications);
        CHECK(cell.valid == (cell.failed * 100 <= cell.replications));
        for (const auto& ps : cell.parameters) {
            CHECK(ps.rmse == doctest::Approx(std::sqrt(ps.mse)).epsilon(1e-9));
            CHECK(ps.bias_ci.lo <= ps.bias_ci.hi);
            CHECK(ps.coverage95 >= 0.0);
            CHECK(ps.coverage95 <= 1.0);
        }
        // Efficiency is the ratio of the paired MSEs.
        for (const auto& es : cell.efficiency) {
            double base = 0.0, pmm = 0.0;
            for (const auto& ps : cell.parameters) {
                if (ps.parameter != es.parameter) continue;
                if (ps.estimator == es.baseline) base = ps.mse;
                if (ps.estimator == Estimator::Pmm2) pmm = ps.mse;
            }
            CHECK(es.re == doctest::Approx(base / pmm).epsilon(1e-9));
            CHECK(es.re_ci.lo <= es.re);
            CHECK(es.re <= es.re_ci.hi);
        }
    }
    const auto curve = re_curve(r);
    CHECK(curve.size() == 2 + 2 * 2);
    for (const auto& row : curve) {
        if (row.innovation.kind == InnovationKind::Gaussian) CHECK(row.re_theoretical == 1.0);
        if (row.innovation.kind == InnovationKind::Gamma)
            CHECK(row.re_theoretical == doctest::Approx(re_theoretical(std::sqrt(2.0), 3.0)));
    }
}

TEST_CASE("a single cell matches the same cell inside a full run") {
    const auto c = small_config();
    const auto r = run(c);
    const auto cell = run_cell(c, c.models[1], 120, c.innovations[1]);
    const auto& same = r.cells[3];
    REQUIRE(same.model_name == cell.model_name);
    REQUIRE(same.innovation == cell.innovation);
    CHECK(cell.seed == same.seed);
    REQUIRE(cell.parameters.size() == same.parameters.size());
    for (std::size_t i = 0; i < cell.parameters.size(); ++i)
        CHECK(cell.parameters[i].mse == same.parameters[i].mse);
}

TEST_CASE("number formatting uses ten significant digits") {
    CHECK(format10(1.0) == "1");
    CHECK(format10(0.1234567890123) == "0.123456789");
    CHECK(round10(1.23456789012345) == 1.23456789);
    CHECK(to_string(Estimator::Pmm2) == "pmm2");
    CHECK(parse_estimator("css") == Estimator::Css);
}

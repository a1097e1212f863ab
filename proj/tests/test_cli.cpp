// Runs the pmm2 executable as a subprocess and checks exit codes and outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmm2/arima.hpp"
#include "pmm2/baseline.hpp"
#include "pmm2/distributions.hpp"
#include "pmm2/moments.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(PMM2_CLI) + " " + args + " 2>" + (fs::temp_directory_path() / "pmm2_cli_err.txt").string();
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string last_stderr() {
    std::ifstream f(fs::temp_directory_path() / "pmm2_cli_err.txt");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "pmm2_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    const auto p = scratch() / name;
    std::ofstream(p) << content;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("simulate writes a deterministic series") {
    const auto a = run("simulate --model 1,1,0 --phi 0.7 --innovation gamma --n 500 --seed 42");
    CHECK(a.code == 0);
    CHECK(count_lines(a.out) == 501);  // header plus 500 rows
    const auto b = run("simulate --model 1,1,0 --phi 0.7 --innovation gamma --n 500 --seed 42");
    CHECK(a.out == b.out);
    const auto c = run("simulate --model 1,1,0 --phi 0.7 --innovation gamma --n 500 --seed 43");
    CHECK(a.out != c.out);
}

TEST_CASE("simulate rejects a nonstationary model") {
    const auto r = run("simulate --model 1,0,0 --phi 1.2 --n 100");
    CHECK(r.code == 2);
    CHECK(last_stderr().find("model not stationary") != std::string::npos);
    CHECK(run("simulate --model 1,1,0 --phi 0.5,0.2").code == 2);
    CHECK(run("simulate --model x").code == 2);
    CHECK(run("simulate --innovation cauchy --model 0,0,1 --theta 0.3").code == 2);
    CHECK(run("frobnicate").code == 2);
}

TEST_CASE("fit reports both estimators") {
    const auto sim = run("simulate --model 1,1,0 --phi 0.7 --innovation gamma --n 500 --seed 42");
    const auto path = write_file("gamma.csv", sim.out);
    const auto r = run("fit --input " + path + " --model 1,1,0 --method both");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["converged"] == true);
    const auto& css = j["estimators"]["css"];
    const auto& pm = j["estimators"]["pmm2"];
    CHECK(css["coefficients"].contains("phi1"));
    CHECK(pm["coefficients"].contains("phi1"));
    CHECK(pm["se"].contains("phi1"));
    CHECK(pm["fallback_used"] == false);
    CHECK(pm["moments"]["gamma3"].get<double>() > 0.8);
    CHECK(pm["diagnostics"].contains("ljung_box"));
    CHECK(pm["diagnostics"].contains("jarque_bera"));
    CHECK(pm["information_criteria"]["post_hoc"] == true);
    CHECK(css["information_criteria"]["post_hoc"] == false);
    CHECK(pm.contains("timing_seconds"));
    CHECK(css.contains("timing_seconds"));
    CHECK(pm["timing_seconds"].get<double>() >= css["timing_seconds"].get<double>());
    CHECK(j["efficiency"]["re_det"].get<double>() > 1.0);
    CHECK(std::abs(pm["coefficients"]["phi1"].get<double>() - 0.7) < 0.15);

    const auto a = run("fit --input " + path + " --model 1,1,1 --no-timing");
    const auto b = run("fit --input " + path + " --model 1,1,1 --no-timing");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("timing_seconds") == std::string::npos);

    const auto ols = run("fit --input " + path + " --model 2,1,0 --method ols --intercept");
    REQUIRE(ols.code == 0);
    CHECK(json::parse(ols.out)["estimators"]["ols"]["coefficients"].size() == 3);
    CHECK(run("fit --input " + path + " --model 1,1,1 --method ols").code == 2);
    CHECK(run("fit --input " + path + " --method magic").code == 2);
}

TEST_CASE("fit flags the fallback on symmetric data") {
    // Find a gaussian series whose baseline residuals are nearly symmetric.
    std::string csv;
    for (std::uint64_t seed = 1; seed < 200 && csv.empty(); ++seed) {
        const auto y = pmm2::simulate(pmm2::ModelSpec::make(1, {0.7}, {}),
                                      pmm2::sample(pmm2::InnovationSpec::gaussian(), 599, seed), 200);
        const auto base = pmm2::css_estimate(pmm2::difference(y, 1), 1, 0, false);
        if (std::abs(pmm2::sample_moments(base.residuals).gamma3) < 0.05) {
            std::ostringstream os;
            os << "t,value\n";
            os.precision(17);
            for (std::size_t i = 0; i < y.size(); ++i) os << i + 1 << ',' << y[i] << '\n';
            csv = os.str();
        }
    }
    REQUIRE_FALSE(csv.empty());
    const auto path = write_file("symmetric.csv", csv);
    const auto r = run("fit --input " + path + " --model 1,1,0 --method both --no-timing");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["estimators"]["pmm2"]["fallback_used"] == true);
    CHECK(j["estimators"]["pmm2"]["coefficients"]["phi1"] == j["estimators"]["css"]["coefficients"]["phi1"]);

    const auto v = run("validate --input " + path + " --model 1,1,0 --mode fixed --split 0.8");
    REQUIRE(v.code == 0);
    CHECK(std::abs(json::parse(v.out)["improvement_pct"]["rmse"].get<double>()) < 1.0);
}

TEST_CASE("data errors exit with code 1") {
    CHECK(run("fit --input /nonexistent.csv").code == 1);
    const auto bad = write_file("bad.csv", "date,value\n2020-01-01,abc\n");
    CHECK(run("fit --input " + bad).code == 1);
    const auto tiny = write_file("tiny.csv", "t,value\n1,1\n2,2\n3,4\n");
    CHECK(run("fit --input " + tiny + " --model 1,1,0").code == 1);
}

TEST_CASE("FRED style input with gaps") {
    std::ostringstream os;
    os << "observation_date,DCOILWTICO\n";
    const auto y = pmm2::simulate(pmm2::ModelSpec::make(1, {0.3}, {}),
                                  pmm2::sample(pmm2::InnovationSpec::lognormal(), 499, 5), 200);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const int day = static_cast<int>(i);
        char date[32];
        std::snprintf(date, sizeof date, "%04d-%02d-%02d", 2000 + day / 336, 1 + (day / 28) % 12, 1 + day % 28);
        os << date << ',';
        if (i % 50 == 7) os << ".\n";
        else os << 60.0 + y[i] << '\n';
    }
    const auto path = write_file("fred.csv", os.str());
    const auto r = run("fit --input " + path + " --model 1,1,1 --no-timing");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["input"]["gaps_dropped"] == 6);
    CHECK(j["input"]["observations"] == 294);
    CHECK(j["input"]["value_column"] == "DCOILWTICO");
    const auto s = run("select --input " + path + " --model 1,1,1");
    REQUIRE(s.code == 0);
    CHECK(json::parse(s.out).contains("recommendation"));
}

TEST_CASE("validate reports both estimators and per-forecast errors") {
    const auto sim = run("simulate --model 1,0,0 --phi 0.7 --innovation chisq --n 400 --seed 9");
    const auto path = write_file("chisq.csv", sim.out);
    const auto r = run("validate --input " + path + " --model 1,0,0 --mode rolling --window 300 --refit-every 20");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["n_forecasts"] == 100);
    CHECK(j["estimators"]["css"]["errors"].size() == 100);
    CHECK(j["estimators"]["pmm2"]["errors"].size() == 100);
    CHECK(j["estimators"]["pmm2"]["forecasts"].size() == 100);
    CHECK(j["improvement_pct"].contains("rmse"));
    CHECK(run("validate --input " + path + " --model 1,0,0 --mode rolling --window 500").code == 2);
    CHECK(run("validate --input " + path + " --mode fixed --split 1.5").code == 2);
    CHECK(run("validate --input " + path + " --mode sideways").code == 2);
}

TEST_CASE("mc writes deterministic reports and rejects bad configs") {
    const json cfg = {{"schema_version", 1},
                      {"sample_sizes", {100}},
                      {"models", {{{"name", "ar1"}, {"order", {1, 1, 0}}, {"phi", {0.7}}}}},
                      {"innovations", {"gaussian", {{"kind", "gamma"}, {"params", {{"shape", 2.0}}}}}},
                      {"replications", 30},
                      {"bootstrap_resamples", 100},
                      {"root_seed", 5}};
    const auto path = write_file("mc.json", cfg.dump());
    const auto out1 = (scratch() / "mc1").string();
    const auto out2 = (scratch() / "mc2").string();
    REQUIRE(run("mc --config " + path + " --out " + out1 + " --threads 1").code == 0);
    REQUIRE(run("mc --config " + path + " --out " + out2 + " --threads 2").code == 0);
    for (const char* f : {"report.csv", "re_curve.csv", "summary.json"}) {
        CAPTURE(f);
        CHECK(slurp(fs::path(out1) / f) == slurp(fs::path(out2) / f));
    }
    CHECK(fs::exists(fs::path(out1) / "timing.json"));
    const auto report = slurp(fs::path(out1) / "report.csv");
    CHECK(count_lines(report) == 1 + 2 * 2);  // header plus cells x estimators x parameters

    json bad = cfg;
    bad["replications"] = 5;
    const auto bad_path = write_file("bad_mc.json", bad.dump());
    CHECK(run("mc --config " + bad_path + " --out " + out1).code == 2);
    CHECK(last_stderr().find("/replications") != std::string::npos);
    const auto junk = write_file("junk.json", "{ not json");
    CHECK(run("mc --config " + junk + " --out " + out1).code == 2);
}

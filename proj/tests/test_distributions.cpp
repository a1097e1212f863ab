#include "helpers.hpp"

#include "pmm2/distributions.hpp"
#include "pmm2/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace pmm2;
using testutil::mean;
using testutil::skewness;
using testutil::variance;

TEST_CASE("gaussian draws are standardized") {
    const auto x = sample(InnovationSpec::gaussian(), 1'000'000, 1);
    CHECK(std::abs(mean(x)) < 0.005);
    CHECK(std::abs(variance(x) - 1.0) < 0.01);
}

TEST_CASE("gamma(2) sample skewness") {
    const auto x = sample(InnovationSpec::gamma(2.0), 1'000'000, 1);
    CHECK(std::abs(skewness(x) - 1.414) < 0.02);
}

TEST_CASE("chi-square(3) sample skewness") {
    const auto x = sample(InnovationSpec::chi_square(3.0), 1'000'000, 7);
    CHECK(std::abs(skewness(x) - 1.633) < 0.02);
}

TEST_CASE("theoretical cumulants match closed forms") {
    const auto g = theoretical_cumulants(InnovationSpec::gaussian());
    CHECK(g.gamma3 == 0.0);
    CHECK(g.gamma4 == 0.0);
    CHECK(g.mu2 == 1.0);

    const auto ga = theoretical_cumulants(InnovationSpec::gamma(2.0));
    CHECK(ga.gamma3 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(ga.gamma4 == doctest::Approx(3.0).epsilon(1e-12));

    const auto ch = theoretical_cumulants(InnovationSpec::chi_square(3.0));
    CHECK(ch.gamma3 == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));
    CHECK(ch.gamma3 == doctest::Approx(1.6330).epsilon(1e-4));
    CHECK(ch.gamma4 == doctest::Approx(4.0).epsilon(1e-12));

    for (double s : {0.1, 0.4, 1.0}) {
        const double w = std::exp(s * s);
        const auto ln = theoretical_cumulants(InnovationSpec::lognormal(s));
        CHECK(ln.gamma3 == doctest::Approx((w + 2.0) * std::sqrt(w - 1.0)).epsilon(1e-12));
        CHECK(ln.gamma4 == doctest::Approx(w * w * w * w + 2 * w * w * w + 3 * w * w - 6.0).epsilon(1e-12));
    }

    for (const auto& spec : {InnovationSpec::gaussian(), InnovationSpec::gamma(5.0), InnovationSpec::lognormal(0.4),
                             InnovationSpec::chi_square(3.0)}) {
        const auto m = theoretical_cumulants(spec);
        CHECK(m.mu2 == 1.0);
        CHECK(m.mu3 == doctest::Approx(m.gamma3));
        CHECK(m.mu4 == doctest::Approx(m.gamma4 + 3.0));
        CHECK(m.delta == doctest::Approx(m.mu2 * (m.mu4 - m.mu2 * m.mu2) - m.mu3 * m.mu3));
        CHECK(m.delta > 0.0);
    }
}

TEST_CASE("raw law standardization uses exact moments") {
    auto s = raw_law_standardization(InnovationSpec::gamma(2.5));
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.sd == doctest::Approx(std::sqrt(2.5)));
    s = raw_law_standardization(InnovationSpec::chi_square(3.0));
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.sd == doctest::Approx(std::sqrt(6.0)));
    s = raw_law_standardization(InnovationSpec::lognormal(0.4));
    CHECK(s.mean == doctest::Approx(std::exp(0.08)));
    CHECK(s.sd == doctest::Approx(std::sqrt((std::exp(0.16) - 1.0) * std::exp(0.16))));
    // The standardized law has mean 0 and sd 1, so standardizing again is the identity.
    const Standardization again{0.0, 1.0};
    for (double v : {-2.0, 0.0, 3.5}) CHECK(again.apply(again.apply(v)) == v);
}

TEST_CASE("invalid law parameters are rejected") {
    CHECK_THROWS_AS(sample(InnovationSpec::gamma(0.0), 10, 1), ParameterError);
    CHECK_THROWS_AS(sample(InnovationSpec::gamma(-1.0), 10, 1), ParameterError);
    CHECK_THROWS_AS(sample(InnovationSpec::lognormal(0.0), 10, 1), ParameterError);
    CHECK_THROWS_AS(sample(InnovationSpec::chi_square(-3.0), 10, 1), ParameterError);
    CHECK_THROWS_AS(theoretical_cumulants(InnovationSpec::chi_square(0.0)), ParameterError);
    CHECK_THROWS_AS(sample(InnovationSpec::gaussian(), 0, 1), LengthError);
    CHECK_THROWS(parse_innovation_kind("cauchy"));
}

TEST_CASE("sampling is reproducible and seeds give distinct streams") {
    for (const auto& spec : {InnovationSpec::gaussian(), InnovationSpec::gamma(), InnovationSpec::lognormal(),
                             InnovationSpec::chi_square()}) {
        const auto a = sample(spec, 1000, 99);
        const auto b = sample(spec, 1000, 99);
        const auto c = sample(spec, 1000, 100);
        CHECK(a == b);
        CHECK(a != c);
    }
}

TEST_CASE("labels and parsing round trip") {
    CHECK(InnovationSpec::gamma(2.0).label() == "gamma(2)");
    CHECK(parse_innovation_kind("gaussian") == InnovationKind::Gaussian);
    CHECK(parse_innovation_kind("chisq") == InnovationKind::ChiSquare);
    CHECK(parse_innovation_kind("lognormal") == InnovationKind::Lognormal);
    CHECK(default_innovation(InnovationKind::ChiSquare).param == 3.0);
}

// Third and fourth raw moments of 1e6 standardized draws lie within three
// Monte Carlo standard errors of the exact values.
TEST_CASE("sample cumulants converge to theoretical cumulants") {
    const std::size_t n = 1'000'000;
    for (const auto& spec : {InnovationSpec::gaussian(), InnovationSpec::gamma(), InnovationSpec::lognormal(),
                             InnovationSpec::chi_square()}) {
        CAPTURE(spec.label());
        const auto x = sample(spec, n, 2024);
        const auto th = theoretical_cumulants(spec);
        std::vector<double> p1(n), p2(n), p3(n), p4(n);
        for (std::size_t i = 0; i < n; ++i) {
            p1[i] = x[i];
            p2[i] = x[i] * x[i];
            p3[i] = p2[i] * x[i];
            p4[i] = p2[i] * p2[i];
        }
        const auto se = [&](const std::vector<double>& v) { return std::sqrt(variance(v) / static_cast<double>(n)); };
        CHECK(std::abs(mean(p1)) < 3.0 * se(p1));
        CHECK(std::abs(mean(p2) - 1.0) < 3.0 * se(p2));
        CHECK(std::abs(mean(p3) - th.mu3) < 3.0 * se(p3));
        CHECK(std::abs(mean(p4) - th.mu4) < 3.0 * se(p4));
    }
}

#include "pmm2/distributions.hpp"

#include "pmm2/errors.hpp"
#include "pmm2/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

namespace pmm2 {

std::string_view to_string(InnovationKind kind) {
    switch (kind) {
        case InnovationKind::Gaussian: return "gaussian";
        case InnovationKind::Gamma: return "gamma";
        case InnovationKind::Lognormal: return "lognormal";
        case InnovationKind::ChiSquare: return "chisq";
    }
    return "unknown";
}

InnovationKind parse_innovation_kind(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "gaussian" || s == "normal") return InnovationKind::Gaussian;
    if (s == "gamma") return InnovationKind::Gamma;
    if (s == "lognormal") return InnovationKind::Lognormal;
    if (s == "chisq" || s == "chi_square" || s == "chisquare" || s == "chi2") return InnovationKind::ChiSquare;
    throw ParameterError("unknown innovation law '" + std::string(name) + "'");
}

InnovationSpec default_innovation(InnovationKind kind) {
    switch (kind) {
        case InnovationKind::Gaussian: return InnovationSpec::gaussian();
        case InnovationKind::Gamma: return InnovationSpec::gamma();
        case InnovationKind::Lognormal: return InnovationSpec::lognormal();
        case InnovationKind::ChiSquare: return InnovationSpec::chi_square();
    }
    return InnovationSpec::gaussian();
}

void InnovationSpec::validate() const {
    if (kind == InnovationKind::Gaussian) return;
    if (!(param > 0.0) || !std::isfinite(param)) {
        std::ostringstream os;
        os << to_string(kind) << ": shape parameter must be positive and finite, got " << param;
        throw ParameterError(os.str());
    }
}

std::string InnovationSpec::label() const {
    if (kind == InnovationKind::Gaussian) return "gaussian";
    std::ostringstream os;
    os.precision(10);
    os << to_string(kind) << '(' << param << ')';
    return os.str();
}

Standardization raw_law_standardization(const InnovationSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case InnovationKind::Gaussian: return {0.0, 1.0};
        case InnovationKind::Gamma: return {spec.param, std::sqrt(spec.param)};
        case InnovationKind::Lognormal: {
            const double s2 = spec.param * spec.param;
            const double w = std::exp(s2);
            return {std::exp(0.5 * s2), std::sqrt((w - 1.0) * w)};
        }
        case InnovationKind::ChiSquare: return {spec.param, std::sqrt(2.0 * spec.param)};
    }
    return {0.0, 1.0};
}

namespace {

template <class Dist, class Transform>
std::vector<double> draw(Dist dist, Transform f, std::size_t n, std::uint64_t seed) {
    auto engine = rng::make_engine(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = f(dist(engine));
    return out;
}

}  // namespace

std::vector<double> sample(const InnovationSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw LengthError("sample: n must be at least 1");
    const Standardization st = raw_law_standardization(spec);
    auto standardize = [st](double x) { return st.apply(x); };
    switch (spec.kind) {
        case InnovationKind::Gaussian:
            return draw(std::normal_distribution<double>(0.0, 1.0), standardize, n, seed);
        case InnovationKind::Gamma:
            return draw(std::gamma_distribution<double>(spec.param, 1.0), standardize, n, seed);
        case InnovationKind::Lognormal:
            return draw(std::lognormal_distribution<double>(0.0, spec.param), standardize, n, seed);
        case InnovationKind::ChiSquare:
            return draw(std::chi_squared_distribution<double>(spec.param), standardize, n, seed);
    }
    return {};
}

MomentSet theoretical_cumulants(const InnovationSpec& spec) {
    spec.validate();
    double g3 = 0.0;
    double g4 = 0.0;
    switch (spec.kind) {
        case InnovationKind::Gaussian: break;
        case InnovationKind::Gamma:
            g3 = 2.0 / std::sqrt(spec.param);
            g4 = 6.0 / spec.param;
            break;
        case InnovationKind::Lognormal: {
            const double w = std::exp(spec.param * spec.param);
            g3 = (w + 2.0) * std::sqrt(w - 1.0);
            g4 = w * w * w * w + 2.0 * w * w * w + 3.0 * w * w - 6.0;
            break;
        }
        case InnovationKind::ChiSquare:
            g3 = std::sqrt(8.0 / spec.param);
            g4 = 12.0 / spec.param;
            break;
    }
    return MomentSet::from_cumulants(g3, g4);
}

}  // namespace pmm2

#pragma once

#include "pmm2/moments.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pmm2 {

enum class InnovationKind { Gaussian, Gamma, Lognormal, ChiSquare };

/// A named innovation law. `param` is the single shape value of the law:
/// Gamma shape k (scale 1), Lognormal sdlog (meanlog 0), ChiSquare degrees
/// of freedom. Ignored for Gaussian. Draws are always standardized to zero
/// mean and unit variance using the exact law moments.
struct InnovationSpec {
    InnovationKind kind = InnovationKind::Gaussian;
    double param = 0.0;

    static InnovationSpec gaussian() { return {InnovationKind::Gaussian, 0.0}; }
    static InnovationSpec gamma(double shape = 2.0) { return {InnovationKind::Gamma, shape}; }
    static InnovationSpec lognormal(double sdlog = 0.4) { return {InnovationKind::Lognormal, sdlog}; }
    static InnovationSpec chi_square(double df = 3.0) { return {InnovationKind::ChiSquare, df}; }

    /// Throws ParameterError for a nonpositive shape, sdlog or df.
    void validate() const;

    /// Canonical label, e.g. "gamma(2)". Stable; used to key seed streams.
    std::string label() const;

    bool operator==(const InnovationSpec&) const = default;
};

std::string_view to_string(InnovationKind kind);
/// Accepts "gaussian"/"normal", "gamma", "lognormal", "chisq"/"chi_square"/"chisquare".
InnovationKind parse_innovation_kind(std::string_view name);
/// Kind name plus the law's default parameter.
InnovationSpec default_innovation(InnovationKind kind);

/// Exact mean and standard deviation of the raw (unstandardized) law.
struct Standardization {
    double mean = 0.0;
    double sd = 1.0;
    double apply(double x) const { return (x - mean) / sd; }
};
Standardization raw_law_standardization(const InnovationSpec& spec);

/// n i.i.d. standardized draws. Identical (spec, n, seed) gives identical bits.
std::vector<double> sample(const InnovationSpec& spec, std::size_t n, std::uint64_t seed);

/// Exact mu2 = 1, mu3 = gamma3, mu4 = gamma4 + 3 of the standardized law.
MomentSet theoretical_cumulants(const InnovationSpec& spec);

}  // namespace pmm2

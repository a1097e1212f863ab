#pragma once

#include <span>

namespace pmm2 {

/// Central moments up to order four plus the quantities derived from them.
///
/// delta = mu2 (mu4 - mu2^2) - mu3^2 is the denominator of the second-order
/// polynomial weights; it is strictly positive for every nondegenerate law.
struct MomentSet {
    double mu2 = 1.0;
    double mu3 = 0.0;
    double mu4 = 3.0;
    double delta = 2.0;
    double gamma3 = 0.0;
    double gamma4 = 0.0;  // excess kurtosis

    /// Throws DegeneracyError when mu2 <= 0 or delta <= 0.
    static MomentSet from_central(double mu2, double mu3, double mu4);

    /// Standardized law with the given skewness and excess kurtosis.
    static MomentSet from_cumulants(double gamma3, double gamma4);

    /// Moments of `mu3 = 0` but otherwise unchanged. Used by the symmetric
    /// (least-squares) limit.
    MomentSet symmetrized() const;
};

/// Central moments about the sample mean with divisor n.
/// Throws LengthError for n < 8 and DegeneracyError as for from_central.
MomentSet sample_moments(std::span<const double> residuals);

/// Raw (mean, central mu2, mu3, mu4) with divisor n; no degeneracy checks.
struct RawMoments {
    double mean = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double mu4 = 0.0;
};
RawMoments central_moments(std::span<const double> x);

}  // namespace pmm2

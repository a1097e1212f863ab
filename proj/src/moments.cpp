#include "pmm2/moments.hpp"

#include "pmm2/errors.hpp"

#include <cmath>
#include <string>

namespace pmm2 {

MomentSet MomentSet::from_central(double mu2, double mu3, double mu4) {
    if (!(mu2 > 0.0) || !std::isfinite(mu2)) {
        throw DegeneracyError("moment set: variance must be positive, got " + std::to_string(mu2));
    }
    MomentSet m;
    m.mu2 = mu2;
    m.mu3 = mu3;
    m.mu4 = mu4;
    m.delta = mu2 * (mu4 - mu2 * mu2) - mu3 * mu3;
    if (!(m.delta > 0.0)) {
        throw DegeneracyError("moment set: delta = mu2(mu4 - mu2^2) - mu3^2 must be positive");
    }
    m.gamma3 = mu3 / std::pow(mu2, 1.5);
    m.gamma4 = mu4 / (mu2 * mu2) - 3.0;
    return m;
}

MomentSet MomentSet::from_cumulants(double gamma3, double gamma4) {
    return from_central(1.0, gamma3, gamma4 + 3.0);
}

MomentSet MomentSet::symmetrized() const { return from_central(mu2, 0.0, mu4); }

RawMoments central_moments(std::span<const double> x) {
    RawMoments r;
    if (x.empty()) return r;
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    r.mean = sum / n;
    for (double v : x) {
        const double e = v - r.mean;
        const double e2 = e * e;
        r.mu2 += e2;
        r.mu3 += e2 * e;
        r.mu4 += e2 * e2;
    }
    r.mu2 /= n;
    r.mu3 /= n;
    r.mu4 /= n;
    return r;
}

MomentSet sample_moments(std::span<const double> residuals) {
    if (residuals.size() < 8) {
        throw LengthError("sample_moments: need at least 8 residuals, got " +
                          std::to_string(residuals.size()));
    }
    const RawMoments r = central_moments(residuals);
    return MomentSet::from_central(r.mu2, r.mu3, r.mu4);
}

}  // namespace pmm2

#include "pmm2/arima.hpp"

#include "pmm2/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace pmm2 {

ModelSpec ModelSpec::make(std::size_t d, std::vector<double> phi, std::vector<double> theta,
                          std::optional<double> intercept) {
    ModelSpec m;
    m.p = phi.size();
    m.d = d;
    m.q = theta.size();
    m.phi = std::move(phi);
    m.theta = std::move(theta);
    m.intercept = intercept;
    return m;
}

std::vector<double> ModelSpec::coefficients() const {
    std::vector<double> c;
    c.reserve(num_coefficients());
    c.insert(c.end(), phi.begin(), phi.end());
    c.insert(c.end(), theta.begin(), theta.end());
    if (intercept) c.push_back(*intercept);
    return c;
}

ModelSpec ModelSpec::from_coefficients(std::size_t p, std::size_t d, std::size_t q,
                                       std::span<const double> coef, bool with_intercept) {
    if (coef.size() != p + q + (with_intercept ? 1 : 0)) {
        throw ParameterError("coefficient vector has wrong length for the requested orders");
    }
    ModelSpec m;
    m.p = p;
    m.d = d;
    m.q = q;
    m.phi.assign(coef.begin(), coef.begin() + static_cast<std::ptrdiff_t>(p));
    m.theta.assign(coef.begin() + static_cast<std::ptrdiff_t>(p),
                   coef.begin() + static_cast<std::ptrdiff_t>(p + q));
    if (with_intercept) m.intercept = coef[p + q];
    return m;
}

std::string ModelSpec::label() const {
    std::ostringstream os;
    os.precision(10);
    os << "ARIMA(" << p << ',' << d << ',' << q << ')';
    for (double v : phi) os << ";phi=" << v;
    for (double v : theta) os << ";theta=" << v;
    if (intercept) os << ";c=" << *intercept;
    return os.str();
}

std::vector<double> difference(std::span<const double> y, std::size_t d) {
    if (y.size() <= d) {
        throw LengthError("difference: series of length " + std::to_string(y.size()) +
                          " is too short for d=" + std::to_string(d));
    }
    std::vector<double> z(y.begin(), y.end());
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t t = 0; t + 1 < z.size(); ++t) z[t] = z[t + 1] - z[t];
        z.pop_back();
    }
    return z;
}

std::vector<double> integrate(std::span<const double> z, std::size_t d) {
    std::vector<double> y(z.begin(), z.end());
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> next(y.size() + 1, 0.0);
        for (std::size_t t = 0; t < y.size(); ++t) next[t + 1] = next[t] + y[t];
        y = std::move(next);
    }
    return y;
}

namespace {

// Largest |x| over the roots of x^k + a_1 x^{k-1} + ... + a_k.
double companion_spectral_radius(std::span<const double> a) {
    const auto k = static_cast<Eigen::Index>(a.size());
    if (k == 0) return 0.0;
    if (k == 1) return std::abs(a[0]);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) c(0, j) = -a[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < k; ++i) c(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Multiply coefficient i (1-based) by r^i; scales every root by 1/r.
void rescale(std::span<double> coef, double r) {
    double f = r;
    for (double& c : coef) {
        c *= f;
        f *= r;
    }
}

bool project_side(std::span<double> coef, double radius, double margin) {
    if (coef.empty() || radius < 1.0) return false;
    rescale(coef, 1.0 / (radius * (1.0 + margin)));
    return true;
}

}  // namespace

double max_inverse_root_ar(std::span<const double> phi) {
    std::vector<double> a(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) a[i] = -phi[i];
    return companion_spectral_radius(a);
}

double max_inverse_root_ma(std::span<const double> theta) { return companion_spectral_radius(theta); }

bool is_stationary(const ModelSpec& model) { return max_inverse_root_ar(model.phi) < 1.0; }
bool is_invertible(const ModelSpec& model) { return max_inverse_root_ma(model.theta) < 1.0; }
bool is_admissible(const ModelSpec& model) { return is_stationary(model) && is_invertible(model); }

bool project_coefficients(std::span<double> coef, std::size_t p, std::size_t q, double margin) {
    auto phi = coef.subspan(0, p);
    auto theta = coef.subspan(p, q);
    const bool a = project_side(phi, max_inverse_root_ar(phi), margin);
    const bool b = project_side(theta, max_inverse_root_ma(theta), margin);
    return a || b;
}

ModelSpec project_to_admissible(const ModelSpec& model, double margin) {
    ModelSpec out = model;
    project_side(out.phi, max_inverse_root_ar(out.phi), margin);
    project_side(out.theta, max_inverse_root_ma(out.theta), margin);
    return out;
}

std::vector<double> simulate(const ModelSpec& model, std::span<const double> innovations,
                             std::size_t burn_in) {
    if (!is_stationary(model)) throw AdmissibilityError("model not stationary");
    if (!is_invertible(model)) throw AdmissibilityError("model not invertible");
    if (innovations.size() <= burn_in) {
        throw LengthError("simulate: need more innovations than the burn-in length");
    }
    const std::size_t total = innovations.size();
    const double c = model.intercept.value_or(0.0);
    std::vector<double> z(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        double v = c + innovations[t];
        for (std::size_t i = 1; i <= model.p && i <= t; ++i) v += model.phi[i - 1] * z[t - i];
        for (std::size_t j = 1; j <= model.q && j <= t; ++j) v += model.theta[j - 1] * innovations[t - j];
        z[t] = v;
    }
    std::span<const double> kept(z.data() + burn_in, total - burn_in);
    return integrate(kept, model.d);
}

std::vector<double> residuals(std::span<const double> z, const ModelSpec& model) {
    const std::size_t m = model.presample();
    const std::size_t n = z.size();
    if (n <= m) {
        throw LengthError("residuals: series length must exceed max(p,q)");
    }
    const double c = model.intercept.value_or(0.0);
    // e[t] for t in [0, n); entries before m stay zero (presample).
    std::vector<double> e(n, 0.0);
    for (std::size_t t = m; t < n; ++t) {
        double v = z[t] - c;
        for (std::size_t i = 1; i <= model.p; ++i) v -= model.phi[i - 1] * z[t - i];
        for (std::size_t j = 1; j <= model.q; ++j) v -= model.theta[j - 1] * e[t - j];
        e[t] = v;
    }
    return {e.begin() + static_cast<std::ptrdiff_t>(m), e.end()};
}

}  // namespace pmm2

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pmm2 {

/// ARIMA(p,d,q) orders and coefficients.
///
///   (1 - phi_1 B - ... - phi_p B^p) (1-B)^d y_t = c + (1 + theta_1 B + ... + theta_q B^q) eps_t
///
/// phi.size() == p and theta.size() == q always; use make() to build one.
struct ModelSpec {
    std::size_t p = 0;
    std::size_t d = 0;
    std::size_t q = 0;
    std::vector<double> phi;
    std::vector<double> theta;
    std::optional<double> intercept;

    static ModelSpec make(std::size_t d, std::vector<double> phi, std::vector<double> theta,
                          std::optional<double> intercept = std::nullopt);

    /// max(p, q): number of leading observations used as presample.
    std::size_t presample() const { return p > q ? p : q; }
    std::size_t num_coefficients() const { return p + q + (intercept ? 1 : 0); }

    /// Coefficients stacked as (phi, theta, intercept?).
    std::vector<double> coefficients() const;
    /// Inverse of coefficients(); `with_intercept` selects whether the last
    /// entry is an intercept.
    static ModelSpec from_coefficients(std::size_t p, std::size_t d, std::size_t q,
                                       std::span<const double> coef, bool with_intercept);

    /// "ARIMA(p,d,q)" plus coefficient values; stable across runs.
    std::string label() const;
};

/// Default burn-in for simulate().
inline constexpr std::size_t kDefaultBurnIn = 200;
/// Default margin for project_to_admissible().
inline constexpr double kDefaultAdmissibilityMargin = 1e-3;

/// d-th order differences; length y.size() - d. Throws LengthError when
/// y.size() <= d.
std::vector<double> difference(std::span<const double> y, std::size_t d);

/// Inverse of difference() with zero integration constants: returns a series
/// of length z.size() + d whose first d values are the zero initial levels,
/// so difference(integrate(z, d), d) == z.
std::vector<double> integrate(std::span<const double> z, std::size_t d);

/// Runs the ARMA recursion on `innovations` (zero presample values), drops
/// the first `burn_in` outputs, then integrates d times. The result has
/// innovations.size() - burn_in + d values. Throws AdmissibilityError for a
/// nonstationary or noninvertible model.
std::vector<double> simulate(const ModelSpec& model, std::span<const double> innovations,
                             std::size_t burn_in = kDefaultBurnIn);

/// Conditional residuals of the ARMA part on an already differenced series:
///   e_t = z_t - c - sum phi_i z_{t-i} - sum theta_j e_{t-j},
/// with presample residuals set to zero. Returns e_t for t = max(p,q)+1..n
/// (length n - max(p,q)).
std::vector<double> residuals(std::span<const double> z, const ModelSpec& model);

/// Largest modulus among the reciprocal roots of 1 - phi_1 x - ... (AR side)
/// or 1 + theta_1 x + ... (MA side). A polynomial has all roots outside the
/// unit circle iff this is < 1. Zero for an empty polynomial.
double max_inverse_root_ar(std::span<const double> phi);
double max_inverse_root_ma(std::span<const double> theta);

bool is_stationary(const ModelSpec& model);
bool is_invertible(const ModelSpec& model);
bool is_admissible(const ModelSpec& model);

/// If a characteristic root lies on or inside the unit circle, rescales that
/// polynomial (coefficient i multiplied by r^i) so that its smallest root
/// modulus becomes exactly 1 + margin. Applied independently to the AR and
/// MA sides; admissible inputs are returned unchanged.
ModelSpec project_to_admissible(const ModelSpec& model, double margin = kDefaultAdmissibilityMargin);

/// In-place variant on a stacked (phi, theta, ...) coefficient vector.
/// Returns true when anything was changed.
bool project_coefficients(std::span<double> coef, std::size_t p, std::size_t q,
                          double margin = kDefaultAdmissibilityMargin);

}  // namespace pmm2

#pragma once

#include "pmm2/moments.hpp"
#include "pmm2/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <span>
#include <vector>

namespace testutil {

inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

inline double skewness(std::span<const double> x) {
    const auto r = pmm2::central_moments(x);
    return r.mu3 / std::pow(r.mu2, 1.5);
}

inline double excess_kurtosis(std::span<const double> x) {
    const auto r = pmm2::central_moments(x);
    return r.mu4 / (r.mu2 * r.mu2) - 3.0;
}

inline double lag1_autocorrelation(std::span<const double> x) {
    const double m = mean(x);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - m) * (x[t] - m);
        if (t > 0) num += (x[t] - m) * (x[t - 1] - m);
    }
    return num / den;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& g, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n01;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n01(g);
    return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& g, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> n01;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * n01(g);
    return v;
}

// A valid moment set: mu4 is pushed far enough above mu2^2 + mu3^2 / mu2 to keep delta > 0.
inline pmm2::MomentSet random_moments(std::mt19937_64& g, bool symmetric = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mu2 = 0.3 + 2.0 * u(g);
    const double mu3 = symmetric ? 0.0 : (u(g) - 0.5) * 3.0 * std::pow(mu2, 1.5);
    const double floor = mu2 * mu2 + mu3 * mu3 / mu2;
    const double mu4 = floor + (0.2 + 3.0 * u(g)) * mu2 * mu2;
    return pmm2::MomentSet::from_central(mu2, mu3, mu4);
}

}  // namespace testutil

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "ounloc/core.hpp"
#include "ounloc/error.hpp"

namespace ounloc::testing {

// Uniform field in [0, side]^q with ground-truth targets.
inline SensorField random_field(std::mt19937_64& rng, int anchors, int targets, int q = 2, double side = 1.0) {
    std::uniform_real_distribution<double> u(0.0, side);
    Matrix y(q, anchors);
    Matrix x(q, targets);
    for (int c = 0; c < anchors; ++c)
        for (int r = 0; r < q; ++r) y(r, c) = u(rng);
    for (int c = 0; c < targets; ++c)
        for (int r = 0; r < q; ++r) x(r, c) = u(rng);
    return SensorField(y, x);
}

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = u(rng);
    return m;
}

inline int sgn(double v) { return (v > 0) - (v < 0); }

// Pairwise concordance count, written out independently of the library.
inline double brute_kendall(const Vector& u, const Vector& v) {
    const Eigen::Index n = u.size();
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) s += sgn(u(i) - u(j)) * sgn(v(i) - v(j));
    return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

// Dense pseudoinverse through the SVD.
inline Matrix pinv(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double tol = 1e-12 * (s.size() ? s(0) : 0.0) * static_cast<double>(std::max(a.rows(), a.cols()));
    Vector inv = s;
    for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace ounloc::testing

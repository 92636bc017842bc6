#include "ounloc/ordinal.hpp"

#include <algorithm>
#include <cmath>

#include "ounloc/error.hpp"
#include "ounloc/rng.hpp"

namespace ounloc {

int compare_ordinal(double d, double d_prime, double xi) {
    const double v = d - d_prime + xi;
    return (v > 0.0) - (v < 0.0);
}

ComparisonTensor tensor_from_distances(const DistanceMatrix& distances, const ComparisonNoiseModel& noise) {
    if (!(noise.sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "comparison noise sigma must be >= 0");
    const int n = distances.order();
    ComparisonTensor z(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        Rng rng = make_stream(noise.seed, {static_cast<std::uint64_t>(k)});
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double xi = noise.sigma > 0.0 ? noise.sigma * normal(rng) : 0.0;
                z.set_pair(k, i, j, compare_ordinal(distances(i, k), distances(j, k), xi));
            }
        }
    }
    return z;
}

SignalMatrix::SignalMatrix(Matrix values, Orientation orientation)
    : SignalMatrix(values, Mask::Constant(values.rows(), values.cols(), true), orientation) {}

SignalMatrix::SignalMatrix(Matrix values, Mask present, Orientation orientation)
    : values_(std::move(values)), present_(std::move(present)), orientation_(orientation) {
    if (values_.rows() != values_.cols()) fail(ErrorCode::InvalidArgument, "signal matrix must be square");
    if (present_.rows() != values_.rows() || present_.cols() != values_.cols()) {
        fail(ErrorCode::InvalidArgument, "signal mask shape does not match values");
    }
    const auto n = values_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        present_(i, i) = false;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (present_(i, j) != present_(j, i)) fail(ErrorCode::InvalidArgument, "signal mask is not symmetric");
            if (!present_(i, j)) continue;
            const double a = values_(i, j);
            const double b = values_(j, i);
            if (!std::isfinite(a) || !std::isfinite(b)) fail(ErrorCode::InvalidArgument, "non-finite signal entry");
            if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
                fail(ErrorCode::InvalidArgument, "signal matrix is not symmetric");
            }
        }
    }
}

SignalComparisons tensor_from_signals(const SignalMatrix& signals) {
    const int n = signals.order();
    const double sign = signals.orientation() == Orientation::IncreasingWithDistance ? 1.0 : -1.0;
    ComparisonTensor z(n);
    std::vector<SliceWarning> warnings;
    const int pairs = n * (n - 1) / 2;
    for (int k = 0; k < n; ++k) {
        int missing = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const bool has_i = i == k || signals.has(i, k);
                const bool has_j = j == k || signals.has(j, k);
                if (!has_i || !has_j) {
                    z.mark_missing(k, i, j);
                    ++missing;
                    continue;
                }
                int value;
                if (i == k) value = -1;
                else if (j == k) value = 1;
                else value = compare_ordinal(sign * signals.values()(i, k), sign * signals.values()(j, k), 0.0);
                z.set_pair(k, i, j, value);
            }
        }
        if (pairs > 0 && 2 * missing > pairs) {
            warnings.push_back({k, static_cast<double>(missing) / pairs});
        }
    }
    return {std::move(z), std::move(warnings)};
}

}  // namespace ounloc

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ounloc/core.hpp"

namespace ounloc {

// Gaussian comparison noise xi ~ N(0, sigma^2), one draw per unordered pair per slice.
struct ComparisonNoiseModel {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// sgn(d - d' + xi); 0 on an exact tie.
int compare_ordinal(double d, double d_prime, double xi);

ComparisonTensor tensor_from_distances(const DistanceMatrix& distances, const ComparisonNoiseModel& noise);

enum class Orientation {
    IncreasingWithDistance,  // e.g. time of arrival
    DecreasingWithDistance,  // e.g. received power
};

// Symmetric matrix of measured distance proxies with a presence mask. The diagonal is always
// treated as missing.
class SignalMatrix {
public:
    using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

    SignalMatrix(Matrix values, Orientation orientation);
    SignalMatrix(Matrix values, Mask present, Orientation orientation);

    int order() const { return static_cast<int>(values_.rows()); }
    const Matrix& values() const { return values_; }
    const Mask& present() const { return present_; }
    Orientation orientation() const { return orientation_; }
    bool has(int i, int j) const { return i != j && present_(i, j); }

private:
    Matrix values_;
    Mask present_;
    Orientation orientation_;
};

struct SliceWarning {
    int slice = 0;
    double missing_fraction = 0.0;
};

struct SignalComparisons {
    ComparisonTensor tensor;
    std::vector<SliceWarning> warnings;
};

// z(k)_ij = sgn(p_ik - p_jk) with p oriented so +1 means i is farther from k. The reference
// sensor counts as nearest to itself; comparisons with an unmeasured link are marked missing.
SignalComparisons tensor_from_signals(const SignalMatrix& signals);

}  // namespace ounloc

#pragma once

#include <vector>

#include "ounloc/core.hpp"

namespace ounloc {

// Smallest admissible slope; fits whose unconstrained slope is <= 0 are clamped here.
inline constexpr double kMinSlope = 1e-9;

// g(psi) = offset + slope * psi, slope > 0.
struct LinearMap {
    double offset = 0.0;
    double slope = 1.0;

    double operator()(double psi) const { return offset + slope * psi; }
};

enum class FitStatus {
    Ok,
    SlopeClamped,  // unconstrained optimum had slope <= 0
    Degenerate,    // proximities constant; slope clamped
};

struct LinearFit {
    LinearMap map;
    FitStatus status = FitStatus::Ok;
};

// Least squares of d on [1, psi] subject to slope > 0. The one-dimensional constrained
// optimum is the clamped unconstrained slope with the intercept refitted.
LinearFit fit_linear_map(const Vector& psi, const Vector& d);

enum class EstimateStage { Preliminary, Recalibrated };

// Anchor-to-target distance estimates, m anchors (rows) x n targets (columns).
struct EstimatedDistanceMatrix {
    Matrix values;
    EstimateStage stage = EstimateStage::Preliminary;
    // One map per anchor (preliminary) or per target (recalibrated).
    std::vector<LinearMap> maps;
    int clamped_fits = 0;
    int degenerate_fits = 0;
    // Anchors whose fit failed; their rows hold the mean of the successful rows.
    std::vector<int> failed_columns;
};

// Fits g_k on (psi^Y_k, d^Y_k) for each anchor k (self pair included) and applies it to the
// targets' scores in slice k.
EstimatedDistanceMatrix preliminary_distances(const ProximityMatrix& psi, const Matrix& anchor_distances);

// Refits one map per target from its slice scores onto the preliminary estimates so that the
// result is an increasing affine image of psi^YX_j.
EstimatedDistanceMatrix recalibrate(const ProximityMatrix& psi, const EstimatedDistanceMatrix& preliminary);

EstimatedDistanceMatrix estimate_distances(const ProximityMatrix& psi, const Matrix& anchor_distances);

}  // namespace ounloc

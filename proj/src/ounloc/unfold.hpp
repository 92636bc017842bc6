#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ounloc/core.hpp"
#include "ounloc/funclearn.hpp"

namespace ounloc {

// How distance estimates become unfolding targets delta.
enum class DeltaMode {
    Squared,  // delta_i = d_i^2 (default; zero cost at the true point for exact data)
    Raw,      // delta_i = d_i as written in the cost
};

struct SolverOptions {
    int restarts = 8;
    int max_iterations = 500;
    // Stop when |grad J| <= gradient_tolerance * (1 + |J|).
    double gradient_tolerance = 1e-9;
    double armijo = 1e-4;
    double backtrack = 0.5;
    std::uint64_t seed = 0;
    DeltaMode delta_mode = DeltaMode::Squared;
};

enum class Termination {
    Converged,
    Stalled,  // no further decrease representable in floating point
    MaxIterations,
};

struct LocalizationResult {
    Vector position;
    double cost = 0.0;
    int iterations = 0;
    int restart = 0;
    Termination termination = Termination::Converged;
    bool well_posed = true;
    // Terminal cost of every restart, in restart order.
    std::vector<double> restart_costs;
};

// J(x) = sum_i (|x - y_i|^2 - delta_i)^2, anchors as columns of `anchors`.
double unfolding_cost(const Vector& x, const Matrix& anchors, const Vector& delta);
Vector unfolding_gradient(const Vector& x, const Matrix& anchors, const Vector& delta);
Matrix unfolding_hessian(const Vector& x, const Matrix& anchors, const Vector& delta);

// Multi-start damped Newton descent. Starts: the anchor centroid, then restarts - 1 points
// uniform in the anchor bounding box.
LocalizationResult unloc_localize(const Matrix& anchors, const Vector& delta, const SolverOptions& options);

struct ColumnOutcome {
    std::optional<LocalizationResult> result;
    std::string error;
};

struct BatchLocalization {
    std::vector<ColumnOutcome> columns;
    // Negative distance estimates seen before squaring.
    int negative_estimates = 0;
};

// Solves each target column independently; a failing column does not abort the others.
BatchLocalization localize_all(const Matrix& anchors, const Matrix& distance_estimates, const SolverOptions& options);
BatchLocalization localize_all(const Matrix& anchors, const EstimatedDistanceMatrix& estimates,
                               const SolverOptions& options);

}  // namespace ounloc

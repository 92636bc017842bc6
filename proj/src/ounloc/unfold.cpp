#include "ounloc/unfold.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ounloc/error.hpp"
#include "ounloc/rng.hpp"

namespace ounloc {

namespace {

void check_shapes(const Vector& x, const Matrix& anchors, const Vector& delta) {
    if (anchors.cols() != delta.size()) fail(ErrorCode::InvalidArgument, "delta length must equal anchor count");
    if (x.size() != anchors.rows()) fail(ErrorCode::InvalidArgument, "position dimension does not match anchors");
}

struct Descent {
    Vector x;
    double cost = 0.0;
    int iterations = 0;
    Termination termination = Termination::MaxIterations;
};

Descent descend(Vector x, const Matrix& anchors, const Vector& delta, const SolverOptions& opt) {
    Descent out;
    double cost = unfolding_cost(x, anchors, delta);
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const Vector g = unfolding_gradient(x, anchors, delta);
        if (g.norm() <= opt.gradient_tolerance * (1.0 + std::abs(cost))) {
            out.termination = Termination::Converged;
            break;
        }
        // Newton direction on |eigenvalues| so that saddles and maxima still yield descent.
        Eigen::SelfAdjointEigenSolver<Matrix> eig(unfolding_hessian(x, anchors, delta));
        Vector lambda = eig.eigenvalues().cwiseAbs();
        const double floor = std::max(1e-12 * lambda.maxCoeff(), std::numeric_limits<double>::min());
        lambda = lambda.cwiseMax(floor);
        const Matrix& v = eig.eigenvectors();
        const Vector dir = -(v * (v.transpose() * g).cwiseQuotient(lambda));
        const double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            out.termination = Termination::Stalled;
            break;
        }
        double t = 1.0;
        bool accepted = false;
        Vector next;
        double next_cost = cost;
        while (t > 1e-16) {
            next = x + t * dir;
            next_cost = unfolding_cost(next, anchors, delta);
            if (next_cost <= cost + opt.armijo * t * slope) {
                accepted = true;
                break;
            }
            t *= opt.backtrack;
        }
        if (!accepted || next == x) {
            out.termination = Termination::Stalled;
            break;
        }
        x = std::move(next);
        cost = next_cost;
    }
    out.x = std::move(x);
    out.cost = cost;
    out.iterations = it;
    return out;
}

}  // namespace

double unfolding_cost(const Vector& x, const Matrix& anchors, const Vector& delta) {
    check_shapes(x, anchors, delta);
    double j = 0.0;
    for (Eigen::Index i = 0; i < anchors.cols(); ++i) {
        const double r = (x - anchors.col(i)).squaredNorm() - delta(i);
        j += r * r;
    }
    return j;
}

Vector unfolding_gradient(const Vector& x, const Matrix& anchors, const Vector& delta) {
    check_shapes(x, anchors, delta);
    Vector g = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i < anchors.cols(); ++i) {
        const Vector diff = x - anchors.col(i);
        g += 4.0 * (diff.squaredNorm() - delta(i)) * diff;
    }
    return g;
}

Matrix unfolding_hessian(const Vector& x, const Matrix& anchors, const Vector& delta) {
    check_shapes(x, anchors, delta);
    const auto q = x.size();
    Matrix h = Matrix::Zero(q, q);
    for (Eigen::Index i = 0; i < anchors.cols(); ++i) {
        const Vector diff = x - anchors.col(i);
        h += 8.0 * diff * diff.transpose();
        h.diagonal().array() += 4.0 * (diff.squaredNorm() - delta(i));
    }
    return h;
}

LocalizationResult unloc_localize(const Matrix& anchors, const Vector& delta, const SolverOptions& options) {
    if (anchors.cols() == 0) fail(ErrorCode::InvalidArgument, "empty unfolding problem: no anchors");
    if (anchors.rows() == 0) fail(ErrorCode::InvalidArgument, "zero-dimensional anchors");
    if (anchors.cols() != delta.size()) fail(ErrorCode::InvalidArgument, "delta length must equal anchor count");
    if (!delta.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite unfolding target");
    if (!anchors.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite anchor coordinate");
    if (options.restarts < 1) fail(ErrorCode::InvalidArgument, "restarts must be >= 1");
    if (options.max_iterations < 1 || !(options.gradient_tolerance > 0.0)) {
        fail(ErrorCode::InvalidArgument, "solver iteration limit and tolerance must be positive");
    }

    const Vector lo = anchors.rowwise().minCoeff();
    const Vector hi = anchors.rowwise().maxCoeff();
    Rng rng = make_stream(options.seed, {0x756e6c6fULL});
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    LocalizationResult best;
    best.well_posed = anchors.cols() >= anchors.rows() + 1;
    best.cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        Vector start(anchors.rows());
        if (r == 0) {
            start = anchors.rowwise().mean();
        } else {
            for (Eigen::Index c = 0; c < start.size(); ++c) start(c) = lo(c) + (hi(c) - lo(c)) * unit(rng);
        }
        Descent d = descend(std::move(start), anchors, delta, options);
        best.restart_costs.push_back(d.cost);
        if (d.cost < best.cost || r == 0) {
            best.position = std::move(d.x);
            best.cost = d.cost;
            best.iterations = d.iterations;
            best.restart = r;
            best.termination = d.termination;
        }
    }
    return best;
}

BatchLocalization localize_all(const Matrix& anchors, const Matrix& distance_estimates, const SolverOptions& options) {
    if (distance_estimates.rows() != anchors.cols()) {
        fail(ErrorCode::InvalidArgument, "distance estimates must have one row per anchor");
    }
    BatchLocalization out;
    out.columns.resize(static_cast<std::size_t>(distance_estimates.cols()));
    for (Eigen::Index j = 0; j < distance_estimates.cols(); ++j) {
        const Vector d = distance_estimates.col(j);
        out.negative_estimates += static_cast<int>((d.array() < 0.0).count());
        const Vector delta = options.delta_mode == DeltaMode::Squared ? Vector(d.array().square()) : d;
        auto& slot = out.columns[static_cast<std::size_t>(j)];
        try {
            slot.result = unloc_localize(anchors, delta, options);
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    }
    return out;
}

BatchLocalization localize_all(const Matrix& anchors, const EstimatedDistanceMatrix& estimates,
                               const SolverOptions& options) {
    return localize_all(anchors, estimates.values, options);
}

}  // namespace ounloc

#include "ounloc/rank.hpp"

#include "ounloc/error.hpp"

namespace ounloc {

PairEnumeration enumerate_pairs(int node_count) {
    if (node_count < 2) fail(ErrorCode::InvalidArgument, "pair enumeration needs at least 2 nodes");
    PairEnumeration e;
    e.node_count = node_count;
    e.pairs.reserve(static_cast<std::size_t>(node_count) * (node_count - 1) / 2);
    for (int i = 0; i < node_count; ++i)
        for (int j = i + 1; j < node_count; ++j) e.pairs.emplace_back(i, j);
    return e;
}

IncidenceMatrix incidence_matrix(const PairEnumeration& edges) {
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(edges.size()), edges.node_count);
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const auto [i, j] = edges.pairs[l];
        b(static_cast<Eigen::Index>(l), i) = 1.0;
        b(static_cast<Eigen::Index>(l), j) = -1.0;
    }
    return {edges, std::move(b)};
}

Vector flatten_slice(const ComparisonTensor& z, int k, const PairEnumeration& edges) {
    if (z.order() != edges.node_count) fail(ErrorCode::InvalidArgument, "slice order does not match enumeration");
    Vector out(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const auto [i, j] = edges.pairs[l];
        out(static_cast<Eigen::Index>(l)) = z(k, i, j);
    }
    return out;
}

Vector ls_rank(const Vector& z, const PairEnumeration& edges) {
    if (static_cast<std::size_t>(z.size()) != edges.size()) {
        fail(ErrorCode::InvalidArgument, "comparison vector length does not match edge count");
    }
    Vector psi = Vector::Zero(edges.node_count);
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const auto [i, j] = edges.pairs[l];
        const double v = z(static_cast<Eigen::Index>(l));
        psi(i) += v;
        psi(j) -= v;
    }
    return psi / static_cast<double>(edges.node_count);
}

Vector ls_rank(const Vector& z, const IncidenceMatrix& b) { return ls_rank(z, b.edges); }

Vector ls_rank_general(const Vector& z, const Matrix& incidence) {
    if (z.size() != incidence.rows()) fail(ErrorCode::InvalidArgument, "comparison vector length does not match B");
    const Matrix laplacian = incidence.transpose() * incidence;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(laplacian);
    Vector psi = cod.solve(incidence.transpose() * z);
    psi.array() -= psi.mean();
    return psi;
}

namespace {

Vector rank_incomplete_slice(const ComparisonTensor& z, int k) {
    const int n = z.order();
    std::vector<std::pair<int, int>> observed;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (z.observed(k, i, j)) observed.emplace_back(i, j);
    if (observed.empty()) return Vector::Zero(n);
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(observed.size()), n);
    Vector rhs(static_cast<Eigen::Index>(observed.size()));
    for (std::size_t l = 0; l < observed.size(); ++l) {
        const auto [i, j] = observed[l];
        const auto row = static_cast<Eigen::Index>(l);
        b(row, i) = 1.0;
        b(row, j) = -1.0;
        rhs(row) = z(k, i, j);
    }
    return ls_rank_general(rhs, b);
}

}  // namespace

ProximityMatrix aggregate_proximities(const ComparisonTensor& z, int anchor_count) {
    const int n = z.order();
    Matrix psi = Matrix::Zero(n, n);
    if (n >= 2) {
        const PairEnumeration edges = enumerate_pairs(n);
        for (int k = 0; k < n; ++k) {
            psi.col(k) = z.slice_complete(k) ? ls_rank(flatten_slice(z, k, edges), edges) : rank_incomplete_slice(z, k);
        }
    }
    return ProximityMatrix(std::move(psi), anchor_count);
}

}  // namespace ounloc

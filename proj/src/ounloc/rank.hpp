#pragma once

#include <utility>
#include <vector>

#include "ounloc/core.hpp"

namespace ounloc {

// Edges (i, j), i < j, of the complete graph on N nodes in lexicographic order.
struct PairEnumeration {
    int node_count = 0;
    std::vector<std::pair<int, int>> pairs;

    std::size_t size() const { return pairs.size(); }
};

PairEnumeration enumerate_pairs(int node_count);

// M x N edge-node incidence matrix: +1 at i_l, -1 at j_l.
struct IncidenceMatrix {
    PairEnumeration edges;
    Matrix values;
};

IncidenceMatrix incidence_matrix(const PairEnumeration& edges);

// z(k) in edge order: z_l = z(k)_{i_l j_l}.
Vector flatten_slice(const ComparisonTensor& z, int k, const PairEnumeration& edges);

// Zero-sum least-squares scores on the complete graph, psi = B^T z / N.
Vector ls_rank(const Vector& z, const PairEnumeration& edges);
Vector ls_rank(const Vector& z, const IncidenceMatrix& b);

// General route for arbitrary edge sets: psi = (B^T B)^+ B^T z, shifted to zero sum.
Vector ls_rank_general(const Vector& z, const Matrix& incidence);

// Column k is the ranking of slice k. Complete slices use the closed form; slices with
// unobserved comparisons drop those edges and go through the general route.
ProximityMatrix aggregate_proximities(const ComparisonTensor& z, int anchor_count);

}  // namespace ounloc

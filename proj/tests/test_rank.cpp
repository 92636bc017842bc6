#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "ounloc/ordinal.hpp"
#include "ounloc/rank.hpp"
#include "support.hpp"

using namespace ounloc;
using ounloc::testing::sgn;

namespace {

// Constrained least squares with the zero-sum row appended, solved by pivoted QR.
Vector qr_oracle(const Matrix& b, const Vector& z) {
    Matrix aug(b.rows() + 1, b.cols());
    aug.topRows(b.rows()) = b;
    aug.bottomRows(1).setOnes();
    Vector rhs(z.size() + 1);
    rhs << z, 0.0;
    return aug.colPivHouseholderQr().solve(rhs);
}

Vector random_comparisons(std::mt19937_64& rng, Eigen::Index m) {
    std::uniform_int_distribution<int> u(-1, 1);
    Vector z(m);
    for (Eigen::Index l = 0; l < m; ++l) z(l) = u(rng);
    return z;
}

}  // namespace

TEST_CASE("pair enumeration") {
    const auto e3 = enumerate_pairs(3);
    CHECK(e3.size() == 3);
    CHECK(e3.pairs == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(enumerate_pairs(2).pairs == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(enumerate_pairs(5).size() == 10);
    CHECK_THROWS_AS(enumerate_pairs(1), Error);
    CHECK_THROWS_AS(enumerate_pairs(0), Error);
}

TEST_CASE("incidence matrix rows and identities") {
    const auto b3 = incidence_matrix(enumerate_pairs(3)).values;
    Matrix expected(3, 3);
    expected << 1, -1, 0,  //
        1, 0, -1,          //
        0, 1, -1;
    CHECK(b3 == expected);
    for (int n = 2; n <= 10; ++n) {
        const Matrix b = incidence_matrix(enumerate_pairs(n)).values;
        CHECK((b * Vector::Ones(n)).isZero(0.0));
        const Matrix lap = n * Matrix::Identity(n, n) - Matrix::Ones(n, n);
        CHECK((b.transpose() * b - lap).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("flatten slice") {
    ComparisonTensor z(3);
    z.set_pair(0, 0, 1, -1);
    z.set_pair(0, 0, 2, -1);
    z.set_pair(0, 1, 2, 1);
    const auto e = enumerate_pairs(3);
    CHECK(flatten_slice(z, 0, e) == Vector((Vector(3) << -1, -1, 1).finished()));
    CHECK(flatten_slice(z, 1, e).isZero(0.0));

    // Skew symmetry rebuilds the whole slice from the flattened vector.
    const Vector f = flatten_slice(z, 0, e);
    ComparisonTensor r(3);
    for (std::size_t l = 0; l < e.size(); ++l) r.set_pair(0, e.pairs[l].first, e.pairs[l].second, int(f(Eigen::Index(l))));
    CHECK(r == z);
}

TEST_CASE("ls_rank small cases") {
    const auto e3 = enumerate_pairs(3);
    const Vector psi = ls_rank(Vector::Constant(3, -1.0), e3);
    CHECK(psi(0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
    CHECK(psi(1) == doctest::Approx(0.0));
    CHECK(psi(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK((qr_oracle(incidence_matrix(e3).values, Vector::Constant(3, -1.0)) - psi).norm() < 1e-14);
    CHECK(ls_rank(Vector::Zero(3), e3).isZero(0.0));

    // Reference at distances 1, 2, 3, 4: the scores are (wins - losses) / N.
    ComparisonTensor z(4);
    const double d[] = {1, 2, 3, 4};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) z.set_pair(0, i, j, sgn(d[i] - d[j]));
    const auto e4 = enumerate_pairs(4);
    const Vector p4 = ls_rank(flatten_slice(z, 0, e4), e4);
    const Vector expected = (Vector(4) << -0.75, -0.25, 0.25, 0.75).finished();
    CHECK((p4 - expected).norm() < 1e-15);
}

TEST_CASE("closed form agrees with pseudoinverse, QR and general routes") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> order(2, 30);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = order(rng);
        const auto e = enumerate_pairs(n);
        const auto b = incidence_matrix(e);
        const Vector z = random_comparisons(rng, static_cast<Eigen::Index>(e.size()));
        const Vector closed = ls_rank(z, b);
        const Vector svd = testing::pinv(b.values) * z;
        const Vector qr = qr_oracle(b.values, z);
        const Vector general = ls_rank_general(z, b.values);
        REQUIRE((closed - svd).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((closed - qr).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((closed - general).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE(std::abs(closed.sum()) < 1e-12);
    }
}

TEST_CASE("Laplacian identity holds for the closed form") {
    std::mt19937_64 rng(22);
    for (int n = 2; n <= 50; n += 3) {
        const auto b = incidence_matrix(enumerate_pairs(n)).values;
        const Vector z = random_comparisons(rng, b.rows());
        const Vector btz = b.transpose() * z;
        const Vector psi = btz / n;
        CHECK((b.transpose() * b * psi - btz).norm() <= 1e-10 * std::max(1.0, btz.norm()));
    }
}

TEST_CASE("aggregated proximities sum to zero and keep the noiseless ordering") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 3 + trial % 7;
        const auto d = pairwise_distances(testing::random_field(rng, m, 1 + trial % 3));
        const auto psi = aggregate_proximities(tensor_from_distances(d, {0.0, 0}), m);
        const int n = d.order();
        CHECK(psi.anchor_count() == m);
        for (int k = 0; k < n; ++k) {
            REQUIRE(std::abs(psi.values().col(k).sum()) < 1e-12);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    REQUIRE(sgn(psi.values()(i, k) - psi.values()(j, k)) == sgn(d(i, k) - d(j, k)));
        }
    }
}

TEST_CASE("relabelling sensors permutes the proximity matrix") {
    std::mt19937_64 rng(24);
    const auto d = pairwise_distances(testing::random_field(rng, 6, 2)).values();
    const int n = static_cast<int>(d.rows());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix dp(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dp(i, j) = d(perm[i], perm[j]);
    const auto a = aggregate_proximities(tensor_from_distances(DistanceMatrix(d, n), {0.0, 0}), n).values();
    const auto b = aggregate_proximities(tensor_from_distances(DistanceMatrix(dp, n), {0.0, 0}), n).values();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(b(i, j) == doctest::Approx(a(perm[i], perm[j])).epsilon(1e-14));
}

TEST_CASE("incomplete slices drop the missing edges") {
    ComparisonTensor z(4);
    const double d[] = {0, 1, 2, 3};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) z.set_pair(0, i, j, sgn(d[i] - d[j]));
    z.mark_missing(0, 1, 3);
    const Vector psi = aggregate_proximities(z, 4).values().col(0);

    Matrix b = incidence_matrix(enumerate_pairs(4)).values;
    Vector zz = flatten_slice(z, 0, enumerate_pairs(4));
    // Edge (1,3) is row 4 in lexicographic order.
    Matrix b5(5, 4);
    Vector z5(5);
    for (int r = 0, o = 0; r < 6; ++r) {
        if (r == 4) continue;
        b5.row(o) = b.row(r);
        z5(o++) = zz(r);
    }
    const Vector oracle = testing::pinv(b5) * z5;
    CHECK((psi - oracle).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(psi.sum()) < 1e-12);
    CHECK(psi(0) < psi(1));
    CHECK(psi(1) < psi(2));
    CHECK(psi(2) < psi(3));
}

#include <doctest.h>

#include "ounloc/bench.hpp"
#include "ounloc/funclearn.hpp"
#include "ounloc/ordinal.hpp"
#include "ounloc/rank.hpp"
#include "support.hpp"

using namespace ounloc;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

// Hand least squares on [1, x] through the normal equations.
std::pair<double, double> normal_equations(const Vector& x, const Vector& y) {
    Matrix a(x.size(), 2);
    a.col(0).setOnes();
    a.col(1) = x;
    const Vector c = (a.transpose() * a).ldlt().solve(a.transpose() * y);
    return {c(0), c(1)};
}

ProximityMatrix noiseless_proximities(const SensorField& field) {
    const auto d = pairwise_distances(field);
    return aggregate_proximities(tensor_from_distances(d, {0.0, 0}), field.anchor_count());
}

}  // namespace

TEST_CASE("fit_linear_map examples") {
    auto f = fit_linear_map(vec({0, 1, 2}), vec({1, 3, 5}));
    CHECK(f.status == FitStatus::Ok);
    CHECK(f.map.offset == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.map.slope == doctest::Approx(2.0).epsilon(1e-15));

    f = fit_linear_map(vec({0, 1, 2}), vec({5, 3, 1}));
    CHECK(f.status == FitStatus::SlopeClamped);
    CHECK(f.map.slope == kMinSlope);
    CHECK(f.map.offset == doctest::Approx(3.0 - kMinSlope).epsilon(1e-15));

    const Vector x = vec({-0.4, 0.1, 0.7, 2.5});
    f = fit_linear_map(x, x);
    CHECK(f.map.offset == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(f.map.slope == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fit_linear_map errors and degenerate input") {
    CHECK_THROWS_AS(fit_linear_map(vec({1}), vec({2})), Error);
    CHECK_THROWS_AS(fit_linear_map(vec({1, 2}), vec({2})), Error);
    const auto f = fit_linear_map(vec({0.5, 0.5, 0.5}), vec({1, 2, 3}));
    CHECK(f.status == FitStatus::Degenerate);
    CHECK(f.map.slope == kMinSlope);
    CHECK(f.map.offset == doctest::Approx(2.0 - kMinSlope * 0.5));
}

TEST_CASE("fit_linear_map matches the normal equations when the slope is positive") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = testing::random_matrix(rng, 8, 1);
        const Vector y = (2.0 + 1.5 * x.array()).matrix() + 0.1 * testing::random_matrix(rng, 8, 1);
        const auto [c0, c1] = normal_equations(x, y);
        const auto f = fit_linear_map(x, y);
        REQUIRE(c1 > 0);
        CHECK(f.map.offset == doctest::Approx(c0).epsilon(1e-12));
        CHECK(f.map.slope == doctest::Approx(c1).epsilon(1e-12));
    }
}

TEST_CASE("identity anchor maps copy the target scores") {
    std::mt19937_64 rng(32);
    const auto field = testing::random_field(rng, 4, 2);
    const Matrix dy = anchor_distances(field.anchors());
    Matrix values = testing::random_matrix(rng, 6, 6);
    values.topLeftCorner(4, 4) = dy;
    const ProximityMatrix psi(values, 4);
    const auto pre = preliminary_distances(psi, dy);
    CHECK(pre.stage == EstimateStage::Preliminary);
    REQUIRE(pre.maps.size() == 4);
    const Matrix xy = psi.block(Block::XY);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 2; ++j) CHECK(pre.values(k, j) == doctest::Approx(xy(j, k)).epsilon(1e-12));
}

TEST_CASE("preliminary estimates keep negative values") {
    Matrix dy(2, 2);
    dy << 0, 1, 1, 0;
    Matrix values(3, 3);
    // Anchor columns map psi -> d as d = psi + 0.5 on the anchor scores; the target score is far below.
    values << -0.5, 0.5, 0.0,  //
        0.5, -0.5, 0.0,        //
        -3.0, -3.0, 0.0;
    const auto pre = preliminary_distances(ProximityMatrix(values, 2), dy);
    CHECK(pre.values(0, 0) == doctest::Approx(-2.5));
    CHECK(pre.values(1, 0) == doctest::Approx(-2.5));
    CHECK_THROWS_AS(preliminary_distances(ProximityMatrix(Matrix::Zero(3, 3), 1), Matrix::Zero(1, 1)), Error);
}

TEST_CASE("noiseless preliminary fits are increasing and keep the slice order") {
    std::mt19937_64 rng(33);
    const auto field = testing::random_field(rng, 10, 1);
    const auto psi = noiseless_proximities(field);
    const auto pre = preliminary_distances(psi, anchor_distances(field.anchors()));
    for (const auto& map : pre.maps) CHECK(map.slope > 0.0);
    CHECK(pre.clamped_fits == 0);
    const Vector truth = pairwise_distances(field).block(Block::YX).col(0);
    const Vector psi_yx = psi.block(Block::YX).col(0);
    const auto post = recalibrate(psi, pre);
    CHECK(kendall_tau(post.values.col(0), truth) == doctest::Approx(kendall_tau(psi_yx, truth)));
}

TEST_CASE("recalibration of a hand-computed column") {
    // Mean psi = 0, mean d = 2, Sxy = 0.6, Sxx = 0.2: slope 3, intercept 2.
    Matrix values = Matrix::Zero(5, 5);
    values.col(4).head(4) = vec({-0.3, -0.1, 0.1, 0.3});
    const ProximityMatrix psi(values, 4);
    EstimatedDistanceMatrix pre;
    pre.values = vec({1, 2, 2, 3});
    const auto post = recalibrate(psi, pre);
    CHECK(post.stage == EstimateStage::Recalibrated);
    REQUIRE(post.maps.size() == 1);
    CHECK(post.maps[0].slope == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(post.maps[0].offset == doctest::Approx(2.0).epsilon(1e-14));
    const Vector expected = vec({1.1, 1.7, 2.3, 2.9});
    CHECK((post.values.col(0) - expected).cwiseAbs().maxCoeff() < 1e-14);
    const auto [c0, c1] = normal_equations(values.col(4).head(4), pre.values.col(0));
    CHECK(c1 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(c0 == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("recalibration is exact on affine input and preserves the score order") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 5 + trial % 6;
        const Matrix values = testing::random_matrix(rng, m + 2, m + 2);
        const ProximityMatrix psi(values, m);
        const Matrix yx = psi.block(Block::YX);
        EstimatedDistanceMatrix pre;
        pre.values = (0.7 + 2.5 * yx.array()).matrix();
        const auto same = recalibrate(psi, pre);
        CHECK((same.values - pre.values).cwiseAbs().maxCoeff() < 1e-12);

        pre.values = testing::random_matrix(rng, m, 2, 0.0, 2.0);
        const auto post = recalibrate(psi, pre);
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (post.maps[j].slope > kMinSlope)
                        REQUIRE(testing::sgn(post.values(a, j) - post.values(b, j)) ==
                                testing::sgn(yx(a, j) - yx(b, j)));
    }
}

TEST_CASE("noiseless pipeline keeps anchor-to-target order") {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const auto field = testing::random_field(rng, 20, 1);
        const auto est = estimate_distances(noiseless_proximities(field), anchor_distances(field.anchors()));
        const Vector truth = pairwise_distances(field).block(Block::YX).col(0);
        CHECK(kendall_tau(est.values.col(0), truth) == 1.0);
    }
}

TEST_CASE("no targets gives an empty estimate") {
    std::mt19937_64 rng(36);
    const auto field = SensorField(testing::random_field(rng, 5, 1).anchors(), 0);
    const auto d = pairwise_distances(field);
    const auto psi = aggregate_proximities(tensor_from_distances(d, {0.0, 0}), 5);
    const auto est = estimate_distances(psi, d.values());
    CHECK(est.values.rows() == 5);
    CHECK(est.values.cols() == 0);
}

TEST_CASE("affine proximities reproduce the true distances") {
    std::mt19937_64 rng(37);
    const auto field = testing::random_field(rng, 8, 3);
    const Matrix d = pairwise_distances(field).values();
    Matrix values = d;
    std::uniform_real_distribution<double> off(-2.0, 2.0);
    std::uniform_real_distribution<double> slope(0.2, 3.0);
    for (Eigen::Index k = 0; k < d.cols(); ++k) values.col(k) = (off(rng) + slope(rng) * d.col(k).array()).matrix();
    const ProximityMatrix psi(values, 8);
    const auto a = estimate_distances(psi, anchor_distances(field.anchors()));
    const auto b = estimate_distances(psi, anchor_distances(field.anchors()));
    CHECK((a.values - extract_block(d, 8, Block::YX)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(a.values == b.values);

    const double lambda = 3.5;
    const auto scaled = estimate_distances(psi, anchor_distances(lambda * field.anchors()));
    CHECK((scaled.values - lambda * a.values).cwiseAbs().maxCoeff() < 1e-9);
}

#include <doctest.h>

#include "ounloc/error.hpp"
#include "ounloc/ordinal.hpp"
#include "ounloc/rng.hpp"
#include "ounloc/signals.hpp"
#include "support.hpp"

using namespace ounloc;
using ounloc::testing::sgn;

namespace {

DistanceMatrix collinear_013() {
    Matrix d(3, 3);
    d << 0, 1, 3,  //
        1, 0, 2,   //
        3, 2, 0;
    return DistanceMatrix(d, 3);
}

void check_skew(const ComparisonTensor& z) {
    const int n = z.order();
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            REQUIRE(z(k, i, i) == 0);
            for (int j = 0; j < n; ++j) REQUIRE(z(k, i, j) + z(k, j, i) == 0);
        }
}

}  // namespace

TEST_CASE("compare_ordinal sign and tie") {
    CHECK(compare_ordinal(1.0, 2.0, 0.0) == -1);
    CHECK(compare_ordinal(1.0, 1.0, 0.0) == 0);
    CHECK(compare_ordinal(1.0, 2.0, 1.5) == 1);
}

TEST_CASE("noiseless tensor of collinear sensors") {
    const auto z = tensor_from_distances(collinear_013(), {0.0, 1});
    // Reference sensor 1 (at 0): sensor 2 (at 1) is nearer than sensor 3 (at 3).
    CHECK(z(0, 1, 2) == -1);
    CHECK(z(0, 2, 1) == 1);
    // Reference sensor 2 (at 1): itself at 0 beats sensor 1 at distance 1.
    CHECK(z(1, 1, 0) == -1);
    CHECK(z(1, 0, 2) == -1);
    // Reference sensor 3 (at 3): sensor 2 is nearer than sensor 1.
    CHECK(z(2, 0, 1) == 1);
    check_skew(z);
}

TEST_CASE("noiseless tensor agrees with the true ordering everywhere") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto d = pairwise_distances(testing::random_field(rng, 8, 3));
        const auto z = tensor_from_distances(d, {0.0, 99});
        const int n = d.order();
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) REQUIRE(z(k, i, j) == sgn(d(i, k) - d(j, k)));
    }
}

TEST_CASE("noisy tensor is skew, seeded and noisy") {
    std::mt19937_64 rng(4);
    const auto d = pairwise_distances(testing::random_field(rng, 10, 2));
    const auto a = tensor_from_distances(d, {0.3, 42});
    const auto b = tensor_from_distances(d, {0.3, 42});
    const auto c = tensor_from_distances(d, {0.3, 43});
    CHECK(a == b);
    CHECK_FALSE(a == c);
    check_skew(a);
    CHECK_FALSE(a == tensor_from_distances(d, {0.0, 42}));
    CHECK_THROWS_AS(tensor_from_distances(d, {-0.1, 1}), Error);
}

TEST_CASE("signal comparisons follow orientation") {
    Matrix s(3, 3);
    s << 0, 0.9, 0.1,  //
        0.9, 0, 0.5,   //
        0.1, 0.5, 0;
    // Received power: stronger means closer, so sensor 2 is nearer to sensor 1 than sensor 3.
    const auto rss = tensor_from_signals(SignalMatrix(s, Orientation::DecreasingWithDistance));
    CHECK(rss.tensor(0, 1, 2) == -1);
    check_skew(rss.tensor);

    Matrix t(3, 3);
    t << 0, 2, 1,  //
        2, 0, 5,   //
        1, 5, 0;
    const auto toa = tensor_from_signals(SignalMatrix(t, Orientation::IncreasingWithDistance));
    CHECK(toa.tensor(0, 1, 2) == 1);

    Matrix e(3, 3);
    e << 0, 0.4, 0.4,  //
        0.4, 0, 0.2,   //
        0.4, 0.2, 0;
    CHECK(tensor_from_signals(SignalMatrix(e, Orientation::DecreasingWithDistance)).tensor(0, 1, 2) == 0);
}

TEST_CASE("the reference sensor is nearest to itself") {
    Matrix t(3, 3);
    t << 0, 2, 1,  //
        2, 0, 5,   //
        1, 5, 0;
    const auto z = tensor_from_signals(SignalMatrix(t, Orientation::IncreasingWithDistance)).tensor;
    CHECK(z(0, 0, 1) == -1);
    CHECK(z(0, 2, 0) == 1);
}

TEST_CASE("monotone reparameterisation leaves the tensor unchanged") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = pairwise_distances(testing::random_field(rng, 9, 2)).values();
        const Matrix warped = (3.0 * d.array().square() + 1.0).matrix();
        const Matrix flipped = (-d.array().log1p()).matrix();
        const auto a = tensor_from_signals(SignalMatrix(d, Orientation::IncreasingWithDistance)).tensor;
        const auto b = tensor_from_signals(SignalMatrix(warped, Orientation::IncreasingWithDistance)).tensor;
        const auto c = tensor_from_signals(SignalMatrix(flipped, Orientation::DecreasingWithDistance)).tensor;
        CHECK(a == b);
        CHECK(a == c);
    }
}

TEST_CASE("shared path-loss exponent reproduces the distance tensor") {
    std::mt19937_64 rng(10);
    const auto d = pairwise_distances(testing::random_field(rng, 12, 2));
    const RssModel model{1.0, 1.0, 3.0, 3.0};
    const Matrix g = Matrix::Constant(d.order(), d.order(), 3.0);
    const auto p = rss_power_matrix(model, d.values(), g);
    const auto from_power = tensor_from_signals(SignalMatrix(p, Orientation::DecreasingWithDistance)).tensor;
    CHECK(from_power == tensor_from_distances(d, {0.0, 0}));
}

TEST_CASE("missing links are marked and heavily masked slices warn") {
    const int n = 5;
    Matrix s = Matrix::Ones(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s(i, j) = 1.0 + i + j;
    SignalMatrix::Mask mask = SignalMatrix::Mask::Constant(n, n, true);
    // Sensor 0 hears only sensor 1.
    for (int j = 2; j < n; ++j) mask(0, j) = mask(j, 0) = false;
    const auto out = tensor_from_signals(SignalMatrix(s, mask, Orientation::IncreasingWithDistance));
    CHECK_FALSE(out.tensor.complete());
    CHECK_FALSE(out.tensor.observed(0, 1, 2));
    CHECK(out.tensor(0, 1, 2) == 0);
    CHECK(out.tensor.observed(0, 0, 1));
    REQUIRE(out.warnings.size() == 1);
    CHECK(out.warnings[0].slice == 0);
    CHECK(out.warnings[0].missing_fraction == doctest::Approx(0.9));
    CHECK(out.tensor.slice_complete(1));
    CHECK_FALSE(out.tensor.slice_complete(2));
}

TEST_CASE("signal matrix validation") {
    Matrix s(2, 2);
    s << 0, 1, 2, 0;
    CHECK_THROWS_AS(SignalMatrix(s, Orientation::IncreasingWithDistance), Error);
    Matrix ok(2, 2);
    ok << 7, 1, 1, 7;
    const SignalMatrix m(ok, Orientation::IncreasingWithDistance);
    CHECK_FALSE(m.has(0, 0));
    CHECK(m.has(0, 1));
}

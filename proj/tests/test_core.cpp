#include <doctest.h>

#include <sstream>

#include "ounloc/core.hpp"
#include "ounloc/error.hpp"
#include "support.hpp"

using namespace ounloc;

namespace {

Matrix cols(std::initializer_list<std::pair<double, double>> pts) {
    Matrix m(2, static_cast<Eigen::Index>(pts.size()));
    Eigen::Index c = 0;
    for (auto [x, y] : pts) {
        m(0, c) = x;
        m(1, c) = y;
        ++c;
    }
    return m;
}

}  // namespace

TEST_CASE("pairwise distances of a 3-4-5 pair") {
    const SensorField field(cols({{0, 0}, {3, 4}}), 0);
    const auto d = pairwise_distances(field);
    CHECK(d.order() == 2);
    CHECK(d(0, 1) == 5.0);
    CHECK(d(1, 0) == 5.0);
    CHECK(d(0, 0) == 0.0);
}

TEST_CASE("single sensor gives a 1x1 zero matrix") {
    const SensorField field(cols({{0.3, 0.7}}), 0);
    const auto d = pairwise_distances(field);
    CHECK(d.order() == 1);
    CHECK(d(0, 0) == 0.0);
}

TEST_CASE("target row holds distances to every sensor") {
    const SensorField field(cols({{0, 0}, {1, 0}}), cols({{0, 1}}));
    const auto d = pairwise_distances(field);
    CHECK(d(2, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d(2, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(d(2, 2) == 0.0);
}

TEST_CASE("distances need ground truth") {
    const SensorField field(cols({{0, 0}, {1, 0}}), 2);
    CHECK_FALSE(field.has_ground_truth());
    try {
        (void)pairwise_distances(field);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("ground truth unavailable") != std::string::npos);
    }
}

TEST_CASE("well-posedness threshold is m >= q + 1") {
    CHECK_FALSE(SensorField(cols({{0, 0}, {1, 0}}), 1).well_posed());
    CHECK(SensorField(cols({{0, 0}, {1, 0}, {0, 1}}), 1).well_posed());
}

TEST_CASE("block views") {
    std::mt19937_64 rng(5);
    const auto field = testing::random_field(rng, 2, 1);
    const auto d = pairwise_distances(field);
    CHECK(d.block(Block::Y).rows() == 2);
    CHECK(d.block(Block::Y).cols() == 2);
    CHECK(d.block(Block::Y) == d.values().topLeftCorner(2, 2));
    CHECK(d.block(Block::XY) == d.block(Block::YX).transpose());
    CHECK(d.block(Block::X).rows() == 1);

    const auto anchors_only = pairwise_distances(SensorField(field.anchors(), 0));
    const Matrix yx = anchors_only.block(Block::YX);
    CHECK(yx.rows() == 2);
    CHECK(yx.cols() == 0);
}

TEST_CASE("blocks reassemble the matrix exactly") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto field = testing::random_field(rng, 3 + trial % 5, 1 + trial % 4);
        const auto d = pairwise_distances(field);
        const int m = d.anchor_count();
        const int n = d.target_count();
        Matrix r(m + n, m + n);
        r.topLeftCorner(m, m) = d.block(Block::Y);
        r.topRightCorner(m, n) = d.block(Block::YX);
        r.bottomLeftCorner(n, m) = d.block(Block::XY);
        r.bottomRightCorner(n, n) = d.block(Block::X);
        CHECK(r == d.values());
    }
}

TEST_CASE("triangle inequality and symmetry over every triple") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const auto field = testing::random_field(rng, 15, 15, 2 + trial % 2);
        const auto d = pairwise_distances(field);
        const int n = d.order();
        for (int i = 0; i < n; ++i) {
            REQUIRE(d(i, i) == 0.0);
            for (int j = 0; j < n; ++j) {
                REQUIRE(d(i, j) == d(j, i));
                for (int k = 0; k < n; ++k) REQUIRE(d(i, j) <= d(i, k) + d(k, j) + 1e-12);
            }
        }
    }
}

TEST_CASE("comparison tensor stores skew pairs") {
    ComparisonTensor z(3);
    z.set_pair(0, 1, 2, -1);
    CHECK(z(0, 1, 2) == -1);
    CHECK(z(0, 2, 1) == 1);
    CHECK(z(0, 1, 1) == 0);
    CHECK(z.complete());
    z.mark_missing(1, 0, 2);
    CHECK_FALSE(z.complete());
    CHECK_FALSE(z.observed(1, 0, 2));
    CHECK_FALSE(z.observed(1, 2, 0));
    CHECK(z.observed(0, 1, 2));
    CHECK(z.slice_complete(0));
    CHECK_FALSE(z.slice_complete(1));
}

TEST_CASE("roster parsing") {
    std::istringstream in(
        "# lab roster\n"
        "id,role,x,y\n"
        "A1,anchor,0,0\n"
        "A2,anchor,4,0\n"
        "\n"
        "T1,target,,\n"
        "A3,anchor,4,5\n"
        "T2,target,1.5,2\n");
    int line = 0;
    const auto r = parse_roster(in, "lab.csv", line, false);
    CHECK(r.dimension == 2);
    CHECK(r.anchor_count() == 3);
    CHECK(r.target_count() == 2);
    CHECK(r.ordered_ids() == std::vector<std::string>{"A1", "A2", "A3", "T1", "T2"});
    const auto field = r.to_field();
    CHECK_FALSE(field.has_ground_truth());
    CHECK(field.anchors()(0, 2) == 4.0);
}

TEST_CASE("roster problems are reported together with line numbers") {
    std::istringstream in(
        "id,role,x,y\n"
        "A1,anchor,0,0\n"
        "A1,anchor,1,0\n"
        "A2,anchor,,\n"
        "T1,robot,1,1\n"
        "T2,target,a,1\n");
    int line = 0;
    try {
        (void)parse_roster(in, "bad.csv", line, false);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Input);
        const std::string msg = e.what();
        CHECK(msg.find("4 problem(s)") != std::string::npos);
        CHECK(msg.find("bad.csv:3: duplicate sensor id 'A1'") != std::string::npos);
        CHECK(msg.find("bad.csv:4: missing anchor coordinates") != std::string::npos);
        CHECK(msg.find("bad.csv:5:") != std::string::npos);
        CHECK(msg.find("bad.csv:6: non-numeric") != std::string::npos);
    }
}

TEST_CASE("roster header is required") {
    std::istringstream in("A1,anchor,0,0\n");
    int line = 0;
    CHECK_THROWS_AS(parse_roster(in, "x.csv", line, false), Error);
}

TEST_CASE("roster round trip with three coordinates") {
    std::istringstream in("id,role,x,y,z\nA,anchor,0,0,0\nB,anchor,1,0,0.5\nC,target,0.25,0.125,1\n");
    int line = 0;
    const auto r = parse_roster(in, "r", line, false);
    std::ostringstream out;
    write_roster(out, r);
    std::istringstream again(out.str());
    line = 0;
    const auto r2 = parse_roster(again, "r2", line, false);
    REQUIRE(r2.sensors.size() == 3);
    CHECK(r2.dimension == 3);
    CHECK(*r2.sensors[2].position == *r.sensors[2].position);
    CHECK(r2.to_field().has_ground_truth());
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ounloc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Anchor and target coordinates. Columns are sensors, rows are the q coordinates.
// Sensor i < m is anchor i; sensor m + j is target j.
class SensorField {
public:
    // Targets with known count but no ground truth (measured data).
    SensorField(Matrix anchors, int target_count);
    // Targets with ground-truth coordinates (simulation).
    SensorField(Matrix anchors, Matrix targets);

    int dimension() const { return static_cast<int>(anchors_.rows()); }
    int anchor_count() const { return static_cast<int>(anchors_.cols()); }
    int target_count() const { return target_count_; }
    int sensor_count() const { return anchor_count() + target_count_; }

    const Matrix& anchors() const { return anchors_; }
    bool has_ground_truth() const { return targets_.has_value(); }
    // Throws when the field carries no target coordinates.
    const Matrix& targets() const;

    // m >= q + 1; below this localization is ill-posed but still attempted.
    bool well_posed() const { return anchor_count() >= dimension() + 1; }

private:
    Matrix anchors_;
    std::optional<Matrix> targets_;
    int target_count_ = 0;
};

enum class Block { Y, X, YX, XY };

// Symmetric N x N matrix partitioned at m: anchors first, then targets.
class DistanceMatrix {
public:
    DistanceMatrix(Matrix values, int anchor_count);

    int order() const { return static_cast<int>(values_.rows()); }
    int anchor_count() const { return anchor_count_; }
    int target_count() const { return order() - anchor_count_; }
    double operator()(int i, int j) const { return values_(i, j); }
    const Matrix& values() const { return values_; }

    // XY is returned as the transpose of the stored YX block.
    Matrix block(Block which) const;

private:
    Matrix values_;
    int anchor_count_;
};

DistanceMatrix pairwise_distances(const SensorField& field);

// Distances among anchors only; available whether or not targets are known.
Matrix anchor_distances(const Matrix& anchors);

// N slices of N x N comparisons z(k)_ij in {-1, 0, +1}; +1 means i is farther from k than j.
// An optional mask records which comparisons were actually observed; when absent every
// entry is observed.
class ComparisonTensor {
public:
    using Slice = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;
    using SliceView = Eigen::Map<const Slice>;

    explicit ComparisonTensor(int order);

    int order() const { return order_; }
    std::int8_t operator()(int k, int i, int j) const { return values_[index(k, i, j)]; }
    SliceView slice(int k) const {
        return SliceView(values_.data() + static_cast<std::size_t>(k) * order_ * order_, order_, order_);
    }

    // Sets z(k)_ij = value and z(k)_ji = -value.
    void set_pair(int k, int i, int j, int value);
    void mark_missing(int k, int i, int j);

    bool complete() const { return observed_.empty(); }
    bool observed(int k, int i, int j) const { return observed_.empty() || observed_[index(k, i, j)] != 0; }
    bool slice_complete(int k) const;

    bool operator==(const ComparisonTensor& other) const;

private:
    std::size_t index(int k, int i, int j) const {
        return (static_cast<std::size_t>(k) * order_ + static_cast<std::size_t>(j)) * order_ +
               static_cast<std::size_t>(i);
    }

    int order_;
    std::vector<std::int8_t> values_;
    std::vector<std::uint8_t> observed_;
};

// Column k holds the zero-sum proximity scores psi(k) of every sensor relative to sensor k.
// Unlike DistanceMatrix the two off-diagonal blocks are independent: YX holds anchor scores
// in target slices and XY holds target scores in anchor slices.
class ProximityMatrix {
public:
    ProximityMatrix(Matrix values, int anchor_count);

    int order() const { return static_cast<int>(values_.rows()); }
    int anchor_count() const { return anchor_count_; }
    int target_count() const { return order() - anchor_count_; }
    const Matrix& values() const { return values_; }

    Matrix block(Block which) const;

private:
    Matrix values_;
    int anchor_count_;
};

Matrix extract_block(const Matrix& values, int anchor_count, Block which);

enum class Role { Anchor, Target };

struct RosterEntry {
    std::string id;
    Role role = Role::Anchor;
    std::optional<Vector> position;
};

// Sensor list parsed from the `id,role,x,y[,z]` CSV format.
struct Roster {
    int dimension = 2;
    std::vector<RosterEntry> sensors;

    // Sensor ids in pipeline order: anchors (file order) then targets (file order).
    std::vector<std::string> ordered_ids() const;
    int anchor_count() const;
    int target_count() const;
    // Targets get ground truth only when every target row carries coordinates.
    SensorField to_field() const;
};

// Parses a roster from `in`, starting at `first_line` for diagnostics. Stops at a `---` line
// when `stop_at_separator` is set and reports whether it was seen.
Roster parse_roster(std::istream& in, std::string_view source, int& line_number, bool stop_at_separator,
                    bool* saw_separator = nullptr);
Roster parse_roster_file(const std::string& path);
void write_roster(std::ostream& out, const Roster& roster);

}  // namespace ounloc

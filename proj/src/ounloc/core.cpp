#include "ounloc/core.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "ounloc/error.hpp"
#include "ounloc/text.hpp"

namespace ounloc {

SensorField::SensorField(Matrix anchors, int target_count)
    : anchors_(std::move(anchors)), target_count_(target_count) {
    if (anchors_.rows() < 1) fail(ErrorCode::InvalidArgument, "sensor field dimension must be positive");
    if (target_count < 0) fail(ErrorCode::InvalidArgument, "negative target count");
    if (!anchors_.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite anchor coordinate");
}

SensorField::SensorField(Matrix anchors, Matrix targets)
    : SensorField(std::move(anchors), static_cast<int>(targets.cols())) {
    if (targets.cols() > 0 && targets.rows() != anchors_.rows()) {
        fail(ErrorCode::InvalidArgument, "target coordinates must have the same dimension as anchors");
    }
    if (!targets.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite target coordinate");
    targets.conservativeResize(anchors_.rows(), targets.cols());
    targets_ = std::move(targets);
}

const Matrix& SensorField::targets() const {
    if (!targets_) fail(ErrorCode::InvalidArgument, "ground truth unavailable: field has no target coordinates");
    return *targets_;
}

Matrix extract_block(const Matrix& values, int m, Block which) {
    const int n = static_cast<int>(values.rows()) - m;
    switch (which) {
        case Block::Y: return values.topLeftCorner(m, m);
        case Block::X: return values.bottomRightCorner(n, n);
        case Block::YX: return values.topRightCorner(m, n);
        case Block::XY: return values.bottomLeftCorner(n, m);
    }
    return {};
}

DistanceMatrix::DistanceMatrix(Matrix values, int anchor_count)
    : values_(std::move(values)), anchor_count_(anchor_count) {
    if (values_.rows() != values_.cols()) fail(ErrorCode::InvalidArgument, "distance matrix must be square");
    if (anchor_count < 0 || anchor_count > values_.rows()) {
        fail(ErrorCode::InvalidArgument, "block boundary outside the matrix");
    }
}

Matrix DistanceMatrix::block(Block which) const {
    if (which == Block::XY) return extract_block(values_, anchor_count_, Block::YX).transpose();
    return extract_block(values_, anchor_count_, which);
}

Matrix anchor_distances(const Matrix& anchors) {
    const auto m = anchors.cols();
    Matrix d = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            d(i, j) = d(j, i) = (anchors.col(i) - anchors.col(j)).norm();
        }
    }
    return d;
}

DistanceMatrix pairwise_distances(const SensorField& field) {
    const int m = field.anchor_count();
    Matrix all(field.dimension(), field.sensor_count());
    all.leftCols(m) = field.anchors();
    if (field.target_count() > 0) all.rightCols(field.target_count()) = field.targets();
    return DistanceMatrix(anchor_distances(all), m);
}

ComparisonTensor::ComparisonTensor(int order)
    : order_(order), values_(static_cast<std::size_t>(order) * order * order, 0) {
    if (order < 0) fail(ErrorCode::InvalidArgument, "negative tensor order");
}

void ComparisonTensor::set_pair(int k, int i, int j, int value) {
    if (i == j) return;
    const auto v = static_cast<std::int8_t>(value > 0 ? 1 : (value < 0 ? -1 : 0));
    values_[index(k, i, j)] = v;
    values_[index(k, j, i)] = static_cast<std::int8_t>(-v);
    if (!observed_.empty()) {
        observed_[index(k, i, j)] = 1;
        observed_[index(k, j, i)] = 1;
    }
}

void ComparisonTensor::mark_missing(int k, int i, int j) {
    if (observed_.empty()) observed_.assign(values_.size(), 1);
    values_[index(k, i, j)] = 0;
    values_[index(k, j, i)] = 0;
    observed_[index(k, i, j)] = 0;
    observed_[index(k, j, i)] = 0;
}

bool ComparisonTensor::slice_complete(int k) const {
    if (observed_.empty()) return true;
    for (int j = 0; j < order_; ++j) {
        for (int i = 0; i < order_; ++i) {
            if (i != j && observed_[index(k, i, j)] == 0) return false;
        }
    }
    return true;
}

bool ComparisonTensor::operator==(const ComparisonTensor& other) const {
    if (order_ != other.order_ || values_ != other.values_) return false;
    if (complete() && other.complete()) return true;
    for (int k = 0; k < order_; ++k) {
        for (int i = 0; i < order_; ++i) {
            for (int j = 0; j < order_; ++j) {
                if (observed(k, i, j) != other.observed(k, i, j)) return false;
            }
        }
    }
    return true;
}

ProximityMatrix::ProximityMatrix(Matrix values, int anchor_count)
    : values_(std::move(values)), anchor_count_(anchor_count) {
    if (values_.rows() != values_.cols()) fail(ErrorCode::InvalidArgument, "proximity matrix must be square");
    if (anchor_count < 0 || anchor_count > values_.rows()) {
        fail(ErrorCode::InvalidArgument, "block boundary outside the matrix");
    }
}

Matrix ProximityMatrix::block(Block which) const { return extract_block(values_, anchor_count_, which); }

std::vector<std::string> Roster::ordered_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : sensors)
        if (s.role == Role::Anchor) ids.push_back(s.id);
    for (const auto& s : sensors)
        if (s.role == Role::Target) ids.push_back(s.id);
    return ids;
}

int Roster::anchor_count() const {
    int count = 0;
    for (const auto& s : sensors) count += s.role == Role::Anchor;
    return count;
}

int Roster::target_count() const { return static_cast<int>(sensors.size()) - anchor_count(); }

SensorField Roster::to_field() const {
    const int m = anchor_count();
    const int n = target_count();
    Matrix anchors(dimension, m);
    Matrix targets(dimension, n);
    bool all_targets_known = true;
    int a = 0;
    int t = 0;
    for (const auto& s : sensors) {
        if (s.role == Role::Anchor) {
            if (!s.position) fail(ErrorCode::Input, "anchor '" + s.id + "' has no coordinates");
            anchors.col(a++) = *s.position;
        } else {
            if (s.position) targets.col(t) = *s.position;
            else all_targets_known = false;
            ++t;
        }
    }
    if (all_targets_known && n > 0) return SensorField(std::move(anchors), std::move(targets));
    return SensorField(std::move(anchors), n);
}

Roster parse_roster(std::istream& in, std::string_view source, int& line_number, bool stop_at_separator,
                    bool* saw_separator) {
    Roster roster;
    std::vector<std::string> problems;
    std::set<std::string> seen;
    bool have_header = false;
    std::string line;
    const auto report = [&](const std::string& msg) {
        problems.push_back(std::string(source) + ":" + std::to_string(line_number) + ": " + msg);
    };
    if (saw_separator) *saw_separator = false;

    while (std::getline(in, line)) {
        ++line_number;
        if (text::is_comment_or_blank(line)) continue;
        const auto trimmed = text::trim(line);
        if (trimmed == "---") {
            if (stop_at_separator) {
                if (saw_separator) *saw_separator = true;
                break;
            }
            report("unexpected section separator");
            continue;
        }
        const auto cols = text::split(trimmed);
        if (!have_header) {
            const bool ok = (cols.size() == 4 || cols.size() == 5) && cols[0] == "id" && cols[1] == "role" &&
                            cols[2] == "x" && cols[3] == "y" && (cols.size() == 4 || cols[4] == "z");
            if (!ok) {
                report("expected header 'id,role,x,y[,z]'");
                break;
            }
            roster.dimension = static_cast<int>(cols.size()) - 2;
            have_header = true;
            continue;
        }
        if (!cols.empty() && cols[0] == "tx_id") {
            report("measurement header before the '---' separator");
            break;
        }
        const std::size_t q = static_cast<std::size_t>(roster.dimension);
        if (cols.size() != 2 && cols.size() != q + 2) {
            report("expected 2 or " + std::to_string(q + 2) + " fields, got " + std::to_string(cols.size()));
            continue;
        }
        RosterEntry entry;
        entry.id = std::string(cols[0]);
        if (entry.id.empty()) {
            report("empty sensor id");
            continue;
        }
        if (cols[1] == "anchor") entry.role = Role::Anchor;
        else if (cols[1] == "target") entry.role = Role::Target;
        else {
            report("role must be 'anchor' or 'target', got '" + std::string(cols[1]) + "'");
            continue;
        }
        bool coords_blank = true;
        for (std::size_t c = 2; c < cols.size(); ++c) coords_blank = coords_blank && cols[c].empty();
        if (!coords_blank) {
            Vector p(roster.dimension);
            bool ok = true;
            for (std::size_t c = 0; c < q; ++c) {
                const auto v = text::parse_double(cols[c + 2]);
                if (!v || !std::isfinite(*v)) {
                    report("non-numeric coordinate '" + std::string(cols[c + 2]) + "'");
                    ok = false;
                    break;
                }
                p(static_cast<Eigen::Index>(c)) = *v;
            }
            if (!ok) continue;
            entry.position = std::move(p);
        }
        if (entry.role == Role::Anchor && !entry.position) {
            report("missing anchor coordinates for '" + entry.id + "'");
            continue;
        }
        if (!seen.insert(entry.id).second) {
            report("duplicate sensor id '" + entry.id + "'");
            continue;
        }
        roster.sensors.push_back(std::move(entry));
    }
    if (!have_header && problems.empty()) {
        problems.push_back(std::string(source) + ": missing roster header 'id,role,x,y[,z]'");
    }
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << problems.size() << " problem(s) in roster";
        for (const auto& p : problems) msg << "\n  " << p;
        fail(ErrorCode::Input, msg.str());
    }
    return roster;
}

Roster parse_roster_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Input, "cannot open sensor field file '" + path + "'");
    int line = 0;
    return parse_roster(in, path, line, false);
}

void write_roster(std::ostream& out, const Roster& roster) {
    out << (roster.dimension == 3 ? "id,role,x,y,z\n" : "id,role,x,y\n");
    for (const auto& s : roster.sensors) {
        out << s.id << ',' << (s.role == Role::Anchor ? "anchor" : "target");
        if (s.position) {
            for (Eigen::Index c = 0; c < s.position->size(); ++c) out << ',' << text::format_double((*s.position)(c));
        }
        out << '\n';
    }
}

}  // namespace ounloc

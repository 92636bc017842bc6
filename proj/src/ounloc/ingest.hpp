#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ounloc/core.hpp"
#include "ounloc/ordinal.hpp"
#include "ounloc/unfold.hpp"

namespace ounloc {

struct MeasurementRecord {
    std::string tx;
    std::string rx;
    std::int64_t timestamp_ms = 0;
    double rssi_dbm = 0.0;
};

// Sensor roster plus raw RSSI records; every record id is in the roster.
struct MeasurementSet {
    Roster roster;
    std::vector<MeasurementRecord> records;
};

// Roster section, a `---` line, then `tx_id,rx_id,timestamp_ms,rssi_dbm` records.
// All malformed rows are reported together, each with its line number.
MeasurementSet parse_measurements(std::istream& in, const std::string& source);
MeasurementSet parse_measurements(const std::string& path);
void write_measurements(std::ostream& out, const MeasurementSet& set);

// Replaces anchor coordinates and target ground truth with those of `field`; ids must match.
MeasurementSet with_roster(const MeasurementSet& set, const Roster& field);

// Keeps, per directed link, the ceil(keep_fraction * count) strongest records (ties by
// timestamp, then file order). Retained records stay in file order.
MeasurementSet select_strong_links(const MeasurementSet& set, double keep_fraction);

enum class Aggregator { Median, Mean, SingleSample };

struct AggregationSpec {
    Aggregator kind = Aggregator::Median;
    int sample_index = 1;  // 1-based, SingleSample only
};

// Symmetric RSSI matrix (dBm, decreasing with distance) in roster pipeline order, pooling both
// link directions. Pairs without records are masked.
SignalMatrix measurement_signal_matrix(const MeasurementSet& set, AggregationSpec spec);

// Smallest retained-record count over directed links that have records.
int min_samples_per_link(const MeasurementSet& set);

struct LocalizeOptions {
    double keep_fraction = 0.01;
    Aggregator aggregator = Aggregator::Median;
    // SingleSample: 0 runs every sample index and averages the estimates.
    int sample_index = 0;
    SolverOptions solver;
};

struct TargetEstimate {
    std::string target_id;
    std::string mode;  // "estimate", "sample" or "average"
    int sample = 0;
    Vector position;
    std::optional<double> error;  // present when ground truth is known
};

struct MeasurementLocalization {
    std::vector<TargetEstimate> rows;
    std::vector<std::string> warnings;
};

// Ordinal pipeline on one signal matrix: comparisons, rank aggregation, function learning and
// unfolding. Returns one result per target column.
BatchLocalization localize_signals(const SensorField& field, const SignalMatrix& signals, const SolverOptions& solver,
                                   std::vector<std::string>* warnings = nullptr);

MeasurementLocalization localize_measurements(const MeasurementSet& set, const LocalizeOptions& options);

// Synthetic log-distance RSSI records: every ordered pair gets `samples` records, each with its
// own path-loss exponent drawn uniformly from [exponent_min, exponent_max].
MeasurementSet synthesize_rss_measurements(const Roster& roster, int samples, double exponent_min,
                                           double exponent_max, double transmit_power_mw, double alpha,
                                           std::uint64_t seed);

}  // namespace ounloc

#include "ounloc/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "ounloc/error.hpp"
#include "ounloc/funclearn.hpp"
#include "ounloc/rank.hpp"
#include "ounloc/rng.hpp"
#include "ounloc/signals.hpp"
#include "ounloc/text.hpp"

namespace ounloc {

MeasurementSet parse_measurements(std::istream& in, const std::string& source) {
    MeasurementSet set;
    int line_number = 0;
    bool saw_separator = false;
    set.roster = parse_roster(in, source, line_number, true, &saw_separator);
    if (!saw_separator) {
        fail(ErrorCode::Input, source + ":" + std::to_string(line_number) +
                                   ": missing '---' separator between roster and measurement records");
    }

    std::unordered_map<std::string, bool> known;
    for (const auto& s : set.roster.sensors) known.emplace(s.id, true);

    std::vector<std::string> problems;
    const auto report = [&](const std::string& msg) {
        problems.push_back(source + ":" + std::to_string(line_number) + ": " + msg);
    };
    bool have_header = false;
    std::string line;
    while (std::getline(in, line)) {
        ++line_number;
        if (text::is_comment_or_blank(line)) continue;
        const auto cols = text::split(text::trim(line));
        if (!have_header) {
            if (cols.size() != 4 || cols[0] != "tx_id" || cols[1] != "rx_id" || cols[2] != "timestamp_ms" ||
                cols[3] != "rssi_dbm") {
                report("expected header 'tx_id,rx_id,timestamp_ms,rssi_dbm'");
                break;
            }
            have_header = true;
            continue;
        }
        if (cols.size() != 4) {
            report("expected 4 fields, got " + std::to_string(cols.size()));
            continue;
        }
        MeasurementRecord r;
        r.tx = std::string(cols[0]);
        r.rx = std::string(cols[1]);
        bool ok = true;
        for (const auto* id : {&r.tx, &r.rx}) {
            if (!known.count(*id)) {
                report("unknown sensor id '" + *id + "'");
                ok = false;
            }
        }
        if (ok && r.tx == r.rx) {
            report("record links sensor '" + r.tx + "' to itself");
            ok = false;
        }
        const auto ts = text::parse_int(cols[2]);
        if (!ts) {
            report("non-numeric timestamp '" + std::string(cols[2]) + "'");
            ok = false;
        }
        const auto rssi = text::parse_double(cols[3]);
        if (!rssi || !std::isfinite(*rssi)) {
            report("non-numeric rssi '" + std::string(cols[3]) + "'");
            ok = false;
        }
        if (!ok) continue;
        r.timestamp_ms = *ts;
        r.rssi_dbm = *rssi;
        set.records.push_back(std::move(r));
    }
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << problems.size() << " malformed measurement row(s)";
        for (const auto& p : problems) msg << "\n  " << p;
        fail(ErrorCode::Input, msg.str());
    }
    return set;
}

MeasurementSet parse_measurements(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Input, "cannot open measurement file '" + path + "'");
    return parse_measurements(in, path);
}

void write_measurements(std::ostream& out, const MeasurementSet& set) {
    write_roster(out, set.roster);
    out << "---\ntx_id,rx_id,timestamp_ms,rssi_dbm\n";
    for (const auto& r : set.records) {
        out << r.tx << ',' << r.rx << ',' << r.timestamp_ms << ',' << text::format_double(r.rssi_dbm) << '\n';
    }
}

MeasurementSet with_roster(const MeasurementSet& set, const Roster& field) {
    MeasurementSet out = set;
    if (field.dimension != set.roster.dimension) {
        fail(ErrorCode::Input, "sensor field dimension differs from the measurement roster");
    }
    std::map<std::string, const RosterEntry*> by_id;
    for (const auto& s : field.sensors) by_id[s.id] = &s;
    if (by_id.size() != set.roster.sensors.size()) {
        fail(ErrorCode::Input, "sensor field and measurement roster list different sensors");
    }
    for (auto& s : out.roster.sensors) {
        const auto it = by_id.find(s.id);
        if (it == by_id.end()) fail(ErrorCode::Input, "sensor '" + s.id + "' is missing from the sensor field");
        if (it->second->role != s.role) fail(ErrorCode::Input, "sensor '" + s.id + "' has a different role in the field");
        if (it->second->position) s.position = it->second->position;
    }
    return out;
}

MeasurementSet select_strong_links(const MeasurementSet& set, double keep_fraction) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "keep fraction must be in (0, 1]");
    }
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> links;
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        links[{set.records[i].tx, set.records[i].rx}].push_back(i);
    }
    std::vector<bool> keep(set.records.size(), false);
    for (auto& [link, idx] : links) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto& ra = set.records[a];
            const auto& rb = set.records[b];
            if (ra.rssi_dbm != rb.rssi_dbm) return ra.rssi_dbm > rb.rssi_dbm;
            return ra.timestamp_ms < rb.timestamp_ms;
        });
        const auto count = static_cast<double>(idx.size());
        const auto kept = static_cast<std::size_t>(std::ceil(keep_fraction * count - 1e-9));
        for (std::size_t i = 0; i < std::min(kept, idx.size()); ++i) keep[idx[i]] = true;
    }
    MeasurementSet out;
    out.roster = set.roster;
    for (std::size_t i = 0; i < set.records.size(); ++i)
        if (keep[i]) out.records.push_back(set.records[i]);
    return out;
}

namespace {

// Retained RSSI per directed link, in file order, indexed by pipeline sensor order.
struct LinkTable {
    int order = 0;
    std::map<std::pair<int, int>, std::vector<double>> values;
    std::vector<std::string> ids;
};

LinkTable link_table(const MeasurementSet& set) {
    LinkTable t;
    t.ids = set.roster.ordered_ids();
    t.order = static_cast<int>(t.ids.size());
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < t.order; ++i) index[t.ids[static_cast<std::size_t>(i)]] = i;
    for (const auto& r : set.records) {
        const auto tx = index.find(r.tx);
        const auto rx = index.find(r.rx);
        if (tx == index.end() || rx == index.end()) fail(ErrorCode::Input, "record references an unknown sensor");
        t.values[{tx->second, rx->second}].push_back(r.rssi_dbm);
    }
    return t;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SignalMatrix measurement_signal_matrix(const MeasurementSet& set, AggregationSpec spec) {
    const LinkTable t = link_table(set);
    const int n = t.order;
    Matrix values = Matrix::Zero(n, n);
    SignalMatrix::Mask present = SignalMatrix::Mask::Constant(n, n, false);
    static const std::vector<double> none;
    const auto link = [&](int a, int b) -> const std::vector<double>& {
        const auto it = t.values.find({a, b});
        return it == t.values.end() ? none : it->second;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& forward = link(i, j);
            const auto& backward = link(j, i);
            if (forward.empty() && backward.empty()) continue;
            double v = 0.0;
            switch (spec.kind) {
                case Aggregator::Median:
                case Aggregator::Mean: {
                    std::vector<double> pooled(forward);
                    pooled.insert(pooled.end(), backward.begin(), backward.end());
                    if (spec.kind == Aggregator::Median) {
                        v = median(std::move(pooled));
                    } else {
                        double s = 0.0;
                        for (double x : pooled) s += x;
                        v = s / static_cast<double>(pooled.size());
                    }
                    break;
                }
                case Aggregator::SingleSample: {
                    if (spec.sample_index < 1) fail(ErrorCode::InvalidArgument, "sample index is 1-based");
                    const auto k = static_cast<std::size_t>(spec.sample_index);
                    double s = 0.0;
                    int used = 0;
                    for (const auto* dir : {&forward, &backward}) {
                        if (dir->empty()) continue;
                        if (dir->size() < k) {
                            const bool fwd = dir == &forward;
                            const auto& a = t.ids[static_cast<std::size_t>(fwd ? i : j)];
                            const auto& b = t.ids[static_cast<std::size_t>(fwd ? j : i)];
                            fail(ErrorCode::Input, "link " + a + "->" + b + " has only " + std::to_string(dir->size()) +
                                                       " retained record(s); sample " + std::to_string(k) +
                                                       " requested");
                        }
                        s += (*dir)[k - 1];
                        ++used;
                    }
                    v = s / used;
                    break;
                }
            }
            values(i, j) = values(j, i) = v;
            present(i, j) = present(j, i) = true;
        }
    }
    return SignalMatrix(std::move(values), std::move(present), Orientation::DecreasingWithDistance);
}

int min_samples_per_link(const MeasurementSet& set) {
    const LinkTable t = link_table(set);
    int best = 0;
    for (const auto& [link, v] : t.values) {
        const int c = static_cast<int>(v.size());
        if (best == 0 || c < best) best = c;
    }
    return best;
}

BatchLocalization localize_signals(const SensorField& field, const SignalMatrix& signals, const SolverOptions& solver,
                                   std::vector<std::string>* warnings) {
    if (signals.order() != field.sensor_count()) {
        fail(ErrorCode::InvalidArgument, "signal matrix order does not match the sensor field");
    }
    if (field.anchor_count() < 2) fail(ErrorCode::Input, "localization needs at least 2 anchors");
    SignalComparisons cmp = tensor_from_signals(signals);
    if (warnings) {
        for (const auto& w : cmp.warnings) {
            warnings->push_back("slice " + std::to_string(w.slice + 1) + " is missing " +
                                std::to_string(static_cast<int>(std::lround(100.0 * w.missing_fraction))) +
                                "% of its comparisons");
        }
        if (!field.well_posed()) warnings->push_back("fewer than q+1 anchors; localization is ill-posed");
    }
    const ProximityMatrix psi = aggregate_proximities(cmp.tensor, field.anchor_count());
    const EstimatedDistanceMatrix est = estimate_distances(psi, anchor_distances(field.anchors()));
    if (warnings) {
        if (est.degenerate_fits > 0) {
            warnings->push_back(std::to_string(est.degenerate_fits) + " distance fit(s) had constant proximities");
        }
        if (est.clamped_fits > 0) {
            warnings->push_back(std::to_string(est.clamped_fits) + " distance fit(s) had their slope clamped");
        }
    }
    return localize_all(field.anchors(), est, solver);
}

MeasurementLocalization localize_measurements(const MeasurementSet& set, const LocalizeOptions& options) {
    const SensorField field = set.roster.to_field();
    const MeasurementSet retained = select_strong_links(set, options.keep_fraction);
    std::vector<std::string> target_ids;
    for (const auto& s : set.roster.sensors)
        if (s.role == Role::Target) target_ids.push_back(s.id);
    const int n = field.target_count();

    MeasurementLocalization out;
    if (n == 0) return out;

    std::vector<int> sample_indices;
    const bool per_sample = options.aggregator == Aggregator::SingleSample;
    if (per_sample && options.sample_index == 0) {
        const int k = min_samples_per_link(retained);
        if (k == 0) fail(ErrorCode::Input, "no retained measurement records");
        for (int s = 1; s <= k; ++s) sample_indices.push_back(s);
    } else {
        sample_indices.push_back(per_sample ? options.sample_index : 0);
    }

    std::vector<Vector> sums(static_cast<std::size_t>(n), Vector::Zero(field.dimension()));
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    const auto error_of = [&](int j, const Vector& p) -> std::optional<double> {
        if (!field.has_ground_truth()) return std::nullopt;
        return (p - field.targets().col(j)).norm();
    };

    for (int s : sample_indices) {
        AggregationSpec spec{options.aggregator, s == 0 ? 1 : s};
        const SignalMatrix signals = measurement_signal_matrix(retained, spec);
        std::vector<std::string> warnings;
        const BatchLocalization batch = localize_signals(field, signals, options.solver, &warnings);
        for (const auto& w : warnings) {
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
        }
        for (int j = 0; j < n; ++j) {
            const auto& col = batch.columns[static_cast<std::size_t>(j)];
            if (!col.result || !col.result->position.allFinite()) {
                out.warnings.push_back("target " + target_ids[static_cast<std::size_t>(j)] + ": " +
                                       (col.error.empty() ? std::string("non-finite estimate") : col.error));
                continue;
            }
            TargetEstimate row;
            row.target_id = target_ids[static_cast<std::size_t>(j)];
            row.mode = per_sample ? "sample" : "estimate";
            row.sample = s;
            row.position = col.result->position;
            row.error = error_of(j, row.position);
            sums[static_cast<std::size_t>(j)] += row.position;
            counts[static_cast<std::size_t>(j)] += 1;
            out.rows.push_back(std::move(row));
        }
    }
    for (int j = 0; j < n; ++j) {
        if (counts[static_cast<std::size_t>(j)] == 0) continue;
        TargetEstimate avg;
        avg.target_id = target_ids[static_cast<std::size_t>(j)];
        avg.mode = "average";
        avg.sample = counts[static_cast<std::size_t>(j)];
        avg.position = sums[static_cast<std::size_t>(j)] / counts[static_cast<std::size_t>(j)];
        avg.error = error_of(j, avg.position);
        out.rows.push_back(std::move(avg));
    }
    return out;
}

MeasurementSet synthesize_rss_measurements(const Roster& roster, int samples, double exponent_min,
                                           double exponent_max, double transmit_power_mw, double alpha,
                                           std::uint64_t seed) {
    if (samples < 1) fail(ErrorCode::InvalidArgument, "need at least one sample per link");
    RssModel model{transmit_power_mw, alpha, exponent_min, exponent_max};
    model.validate();
    for (const auto& s : roster.sensors) {
        if (!s.position) fail(ErrorCode::InvalidArgument, "synthesis needs coordinates for every sensor ('" + s.id + "')");
    }
    MeasurementSet set;
    set.roster = roster;
    Rng rng = make_stream(seed, {0x72737369ULL});
    const auto& sensors = roster.sensors;
    for (int s = 0; s < samples; ++s) {
        std::int64_t link = 0;
        for (const auto& tx : sensors) {
            for (const auto& rx : sensors) {
                if (tx.id == rx.id) continue;
                const double d = std::max((*tx.position - *rx.position).norm(), kMinLinkDistance);
                const double g = sample_path_loss_exponent(exponent_min, exponent_max, rng);
                const double p = rss_power(model, d, g);
                set.records.push_back({tx.id, rx.id, static_cast<std::int64_t>(s) * 1000 + link++, 10.0 * std::log10(p)});
            }
        }
    }
    return set;
}

}  // namespace ounloc

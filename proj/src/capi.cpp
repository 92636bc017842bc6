#include "ounloc/ounloc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <string>

#include "ounloc/bench.hpp"
#include "ounloc/error.hpp"
#include "ounloc/ingest.hpp"
#include "ounloc/text.hpp"

struct ounloc_config {
    ounloc::ConfigMap values;
};

struct ounloc_result {
    ounloc::ExperimentResult result;
};

struct ounloc_measurements {
    ounloc::MeasurementSet set;
};

struct ounloc_localization {
    ounloc::MeasurementLocalization loc;
    int dimension = 2;
};

namespace {

thread_local std::string g_last_error;

ounloc_status set_error(ounloc_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

ounloc_status map_code(ounloc::ErrorCode code) {
    switch (code) {
        case ounloc::ErrorCode::InvalidArgument: return OUNLOC_ERR_INVALID_ARGUMENT;
        case ounloc::ErrorCode::Config: return OUNLOC_ERR_CONFIG;
        case ounloc::ErrorCode::Input: return OUNLOC_ERR_INPUT;
        case ounloc::ErrorCode::Numerical: return OUNLOC_ERR_NUMERICAL;
    }
    return OUNLOC_ERR_INTERNAL;
}

template <class F>
ounloc_status guard(F&& f) {
    try {
        g_last_error.clear();
        f();
        return OUNLOC_OK;
    } catch (const ounloc::Error& e) {
        return set_error(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(OUNLOC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(OUNLOC_ERR_INTERNAL, e.what());
    }
}

#define OUNLOC_REQUIRE(cond, what)                                                       \
    do {                                                                                 \
        if (!(cond)) return set_error(OUNLOC_ERR_INVALID_ARGUMENT, std::string(what));   \
    } while (0)

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "kind",     "dimension", "side",  "anchors",        "targets",   "sigma", "variance", "g-max",
        "noise",    "g-min",     "calibration-g", "p-t",    "alpha",     "speed", "trials",   "seed",
        "restarts", "max-iterations", "tolerance", "delta"};
    return keys;
}

ounloc::LocalizeOptions to_options(const ounloc_localize_options* o) {
    ounloc_localize_options defaults;
    ounloc_localize_options_init(&defaults);
    if (!o) o = &defaults;
    ounloc::LocalizeOptions out;
    out.keep_fraction = o->keep_fraction;
    switch (o->aggregator) {
        case OUNLOC_AGGREGATE_MEDIAN: out.aggregator = ounloc::Aggregator::Median; break;
        case OUNLOC_AGGREGATE_MEAN: out.aggregator = ounloc::Aggregator::Mean; break;
        case OUNLOC_AGGREGATE_SAMPLE: out.aggregator = ounloc::Aggregator::SingleSample; break;
        default: ounloc::fail(ounloc::ErrorCode::InvalidArgument, "unknown aggregator");
    }
    if (o->sample_index < 0) ounloc::fail(ounloc::ErrorCode::InvalidArgument, "sample index must be >= 0");
    out.sample_index = o->sample_index;
    out.solver.restarts = o->restarts;
    out.solver.max_iterations = o->max_iterations;
    out.solver.gradient_tolerance = o->tolerance;
    out.solver.seed = o->seed;
    out.solver.delta_mode = o->raw_delta ? ounloc::DeltaMode::Raw : ounloc::DeltaMode::Squared;
    if (out.solver.restarts < 1 || out.solver.max_iterations < 1 || !(out.solver.gradient_tolerance > 0.0)) {
        ounloc::fail(ounloc::ErrorCode::Config, "restarts, max iterations and tolerance must be positive");
    }
    return out;
}

}  // namespace

extern "C" {

const char* ounloc_version(void) { return OUNLOC_VERSION_STRING; }

const char* ounloc_last_error(void) { return g_last_error.c_str(); }

const char* ounloc_status_name(ounloc_status status) {
    switch (status) {
        case OUNLOC_OK: return "ok";
        case OUNLOC_ERR_CONFIG: return "config error";
        case OUNLOC_ERR_INPUT: return "input error";
        case OUNLOC_ERR_NUMERICAL: return "numerical failure";
        case OUNLOC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case OUNLOC_ERR_IO: return "i/o error";
        case OUNLOC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void ounloc_string_free(char* s) { std::free(s); }

ounloc_status ounloc_config_create(const char* kind, ounloc_config** out) {
    OUNLOC_REQUIRE(out, "output handle is null");
    *out = nullptr;
    return guard([&] {
        auto cfg = std::make_unique<ounloc_config>();
        const std::string k = kind ? kind : "ordinal";
        ounloc::parse_kind(k);
        cfg->values["kind"] = k;
        *out = cfg.release();
    });
}

void ounloc_config_destroy(ounloc_config* config) { delete config; }

ounloc_status ounloc_config_set(ounloc_config* config, const char* key, const char* value) {
    OUNLOC_REQUIRE(config && key && value, "null argument");
    return guard([&] {
        const std::string k(key);
        if (!known_keys().count(k)) ounloc::fail(ounloc::ErrorCode::Config, "unknown configuration key '" + k + "'");
        if (k == "kind") ounloc::parse_kind(value);
        config->values[k] = value;
    });
}

ounloc_status ounloc_config_load_file(ounloc_config* config, const char* path) {
    OUNLOC_REQUIRE(config && path, "null argument");
    return guard([&] {
        std::ifstream in(path);
        if (!in) ounloc::fail(ounloc::ErrorCode::Config, std::string("cannot open config file '") + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        for (const auto& [k, v] : ounloc::parse_config_text(buf.str(), path)) {
            if (!known_keys().count(k)) {
                ounloc::fail(ounloc::ErrorCode::Config, std::string(path) + ": unknown configuration key '" + k + "'");
            }
            config->values[k] = v;
        }
    });
}

ounloc_status ounloc_config_resolve(const ounloc_config* config, char** text_out) {
    OUNLOC_REQUIRE(config && text_out, "null argument");
    *text_out = nullptr;
    return guard([&] {
        const std::string text = ounloc::config_to_text(ounloc::config_from_map(config->values));
        char* s = static_cast<char*>(std::malloc(text.size() + 1));
        if (!s) throw std::bad_alloc();
        std::memcpy(s, text.c_str(), text.size() + 1);
        *text_out = s;
    });
}

ounloc_status ounloc_config_kind(const ounloc_config* config, const char** kind_out) {
    OUNLOC_REQUIRE(config && kind_out, "null argument");
    return guard([&] {
        const auto it = config->values.find("kind");
        *kind_out = ounloc::kind_name(ounloc::parse_kind(it == config->values.end() ? "ordinal" : it->second));
    });
}

int ounloc_config_has(const ounloc_config* config, const char* key) {
    return config && key && config->values.count(key) ? 1 : 0;
}

ounloc_status ounloc_benchmark_run(const ounloc_config* config, unsigned threads, ounloc_result** out) {
    OUNLOC_REQUIRE(config && out, "null argument");
    *out = nullptr;
    return guard([&] {
        const ounloc::ExperimentConfig c = ounloc::config_from_map(config->values);
        auto r = std::make_unique<ounloc_result>();
        r->result = ounloc::run_benchmark(c, threads);
        *out = r.release();
    });
}

void ounloc_result_destroy(ounloc_result* result) { delete result; }

int ounloc_result_reliable(const ounloc_result* result) { return result && result->result.reliable ? 1 : 0; }

size_t ounloc_result_row_count(const ounloc_result* result) { return result ? result->result.rows.size() : 0; }

ounloc_status ounloc_result_row_at(const ounloc_result* result, size_t index, ounloc_result_row* out) {
    OUNLOC_REQUIRE(result && out, "null argument");
    OUNLOC_REQUIRE(index < result->result.rows.size(), "row index out of range");
    const auto& r = result->result.rows[index];
    *out = {r.anchors, r.noise, r.method.c_str(), r.rmse, r.rmse_se, r.mse, r.mse_se, r.tau, r.tau_se, r.trials, r.flagged};
    return OUNLOC_OK;
}

ounloc_status ounloc_result_write_csv(const ounloc_result* result, const char* path) {
    OUNLOC_REQUIRE(result && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) return set_error(OUNLOC_ERR_IO, std::string("cannot write '") + path + "'");
    ounloc::write_result_csv(out, result->result);
    return out ? OUNLOC_OK : set_error(OUNLOC_ERR_IO, std::string("write failed for '") + path + "'");
}

ounloc_status ounloc_result_write_json(const ounloc_result* result, const char* path) {
    OUNLOC_REQUIRE(result && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) return set_error(OUNLOC_ERR_IO, std::string("cannot write '") + path + "'");
    ounloc::write_result_json(out, result->result);
    return out ? OUNLOC_OK : set_error(OUNLOC_ERR_IO, std::string("write failed for '") + path + "'");
}

ounloc_status ounloc_measurements_load(const char* path, ounloc_measurements** out) {
    OUNLOC_REQUIRE(path && out, "null argument");
    *out = nullptr;
    return guard([&] {
        auto m = std::make_unique<ounloc_measurements>();
        m->set = ounloc::parse_measurements(std::string(path));
        *out = m.release();
    });
}

void ounloc_measurements_destroy(ounloc_measurements* set) { delete set; }

ounloc_status ounloc_measurements_apply_field(ounloc_measurements* set, const char* field_path) {
    OUNLOC_REQUIRE(set && field_path, "null argument");
    return guard([&] { set->set = ounloc::with_roster(set->set, ounloc::parse_roster_file(field_path)); });
}

size_t ounloc_measurements_anchor_count(const ounloc_measurements* set) {
    return set ? static_cast<size_t>(set->set.roster.anchor_count()) : 0;
}

size_t ounloc_measurements_target_count(const ounloc_measurements* set) {
    return set ? static_cast<size_t>(set->set.roster.target_count()) : 0;
}

size_t ounloc_measurements_record_count(const ounloc_measurements* set) { return set ? set->set.records.size() : 0; }

ounloc_status ounloc_measurements_synthesize(const char* field_path, int samples_per_link, double g_min, double g_max,
                                             uint64_t seed, const char* out_path) {
    OUNLOC_REQUIRE(field_path && out_path, "null argument");
    return guard([&] {
        const ounloc::Roster roster = ounloc::parse_roster_file(field_path);
        const ounloc::MeasurementSet set =
            ounloc::synthesize_rss_measurements(roster, samples_per_link, g_min, g_max, 1.0, 1.0, seed);
        std::ofstream out(out_path, std::ios::binary);
        if (!out) ounloc::fail(ounloc::ErrorCode::Input, std::string("cannot write '") + out_path + "'");
        ounloc::write_measurements(out, set);
    });
}

void ounloc_localize_options_init(ounloc_localize_options* options) {
    if (!options) return;
    const ounloc::LocalizeOptions d;
    options->keep_fraction = d.keep_fraction;
    options->aggregator = OUNLOC_AGGREGATE_MEDIAN;
    options->sample_index = 0;
    options->restarts = d.solver.restarts;
    options->max_iterations = d.solver.max_iterations;
    options->tolerance = d.solver.gradient_tolerance;
    options->seed = 0;
    options->raw_delta = 0;
}

ounloc_status ounloc_localize_measurements(const ounloc_measurements* set, const ounloc_localize_options* options,
                                           ounloc_localization** out) {
    OUNLOC_REQUIRE(set && out, "null argument");
    *out = nullptr;
    return guard([&] {
        auto l = std::make_unique<ounloc_localization>();
        l->loc = ounloc::localize_measurements(set->set, to_options(options));
        l->dimension = set->set.roster.dimension;
        *out = l.release();
    });
}

void ounloc_localization_destroy(ounloc_localization* loc) { delete loc; }

size_t ounloc_localization_row_count(const ounloc_localization* loc) { return loc ? loc->loc.rows.size() : 0; }

ounloc_status ounloc_localization_row_at(const ounloc_localization* loc, size_t index, ounloc_position_row* out) {
    OUNLOC_REQUIRE(loc && out, "null argument");
    OUNLOC_REQUIRE(index < loc->loc.rows.size(), "row index out of range");
    const auto& r = loc->loc.rows[index];
    out->target_id = r.target_id.c_str();
    out->mode = r.mode.c_str();
    out->sample = r.sample;
    out->dimension = static_cast<int>(r.position.size());
    for (int c = 0; c < 3; ++c) out->position[c] = c < r.position.size() ? r.position(c) : 0.0;
    out->has_error = r.error.has_value();
    out->error = r.error.value_or(std::numeric_limits<double>::quiet_NaN());
    return OUNLOC_OK;
}

size_t ounloc_localization_warning_count(const ounloc_localization* loc) { return loc ? loc->loc.warnings.size() : 0; }

const char* ounloc_localization_warning_at(const ounloc_localization* loc, size_t index) {
    if (!loc || index >= loc->loc.warnings.size()) return nullptr;
    return loc->loc.warnings[index].c_str();
}

ounloc_status ounloc_localization_write_csv(const ounloc_localization* loc, const char* path) {
    OUNLOC_REQUIRE(loc && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) return set_error(OUNLOC_ERR_IO, std::string("cannot write '") + path + "'");
    static const char* axes[] = {"x", "y", "z"};
    out << "target_id,mode,sample";
    for (int c = 0; c < loc->dimension; ++c) out << ',' << axes[c];
    out << ",error\n";
    for (const auto& r : loc->loc.rows) {
        out << r.target_id << ',' << r.mode << ',' << r.sample;
        for (Eigen::Index c = 0; c < r.position.size(); ++c) out << ',' << ounloc::text::format_double(r.position(c));
        out << ',' << (r.error ? ounloc::text::format_double(*r.error) : std::string()) << '\n';
    }
    return out ? OUNLOC_OK : set_error(OUNLOC_ERR_IO, std::string("write failed for '") + path + "'");
}

ounloc_status ounloc_localize_signals(size_t dimension, size_t anchor_count, size_t target_count,
                                      const double* anchors, const double* signals, const unsigned char* present,
                                      int increasing, const ounloc_localize_options* options, double* positions_out) {
    OUNLOC_REQUIRE(anchors && signals && positions_out, "null argument");
    OUNLOC_REQUIRE(dimension >= 1, "dimension must be positive");
    return guard([&] {
        const auto q = static_cast<Eigen::Index>(dimension);
        const auto m = static_cast<Eigen::Index>(anchor_count);
        const auto n = static_cast<Eigen::Index>(target_count);
        const auto order = m + n;
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const ounloc::Matrix y = Eigen::Map<const RowMajor>(anchors, m, q).transpose();
        const ounloc::Matrix s = Eigen::Map<const RowMajor>(signals, order, order);
        ounloc::SignalMatrix::Mask mask = ounloc::SignalMatrix::Mask::Constant(order, order, true);
        if (present) {
            for (Eigen::Index i = 0; i < order; ++i)
                for (Eigen::Index j = 0; j < order; ++j) mask(i, j) = present[i * order + j] != 0;
        }
        const ounloc::SignalMatrix sm(s, mask,
                                      increasing ? ounloc::Orientation::IncreasingWithDistance
                                                 : ounloc::Orientation::DecreasingWithDistance);
        const ounloc::SensorField field(y, static_cast<int>(n));
        const ounloc::LocalizeOptions opts = to_options(options);
        const ounloc::BatchLocalization batch = ounloc::localize_signals(field, sm, opts.solver);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& col = batch.columns[static_cast<std::size_t>(j)];
            if (!col.result) ounloc::fail(ounloc::ErrorCode::Numerical, "target " + std::to_string(j + 1) + ": " + col.error);
            for (Eigen::Index c = 0; c < q; ++c) positions_out[j * q + c] = col.result->position(c);
        }
    });
}

}  // extern "C"

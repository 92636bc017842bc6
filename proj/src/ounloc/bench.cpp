#include "ounloc/bench.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ounloc/error.hpp"
#include "ounloc/funclearn.hpp"
#include "ounloc/ordinal.hpp"
#include "ounloc/rank.hpp"
#include "ounloc/rng.hpp"
#include "ounloc/signals.hpp"
#include "ounloc/text.hpp"

namespace ounloc {

const char* kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::OrdinalNoise: return "ordinal";
        case ExperimentKind::Rss: return "rss";
        case ExperimentKind::Toa: return "toa";
    }
    return "?";
}

ExperimentKind parse_kind(const std::string& name) {
    if (name == "ordinal") return ExperimentKind::OrdinalNoise;
    if (name == "rss") return ExperimentKind::Rss;
    if (name == "toa") return ExperimentKind::Toa;
    fail(ErrorCode::Config, "unknown experiment kind '" + name + "' (expected ordinal, rss or toa)");
}

namespace {

const char* noise_key(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::OrdinalNoise: return "sigma";
        case ExperimentKind::Rss: return "g-max";
        case ExperimentKind::Toa: return "variance";
    }
    return "sigma";
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
        case ExperimentKind::OrdinalNoise:
            break;
        case ExperimentKind::Rss:
            c.noise_grid = {6.0};
            c.trials = 1000;
            break;
        case ExperimentKind::Toa:
            c.side = 200.0;
            c.anchor_counts = {20};
            c.noise_grid = {1e-2, 1e-1, 1.0, 10.0, 100.0};
            c.trials = 1000;
            break;
    }
    return c;
}

void ExperimentConfig::validate() const {
    const auto bad = [](const std::string& what) { fail(ErrorCode::Config, what); };
    if (dimension < 1 || dimension > 3) bad("dimension: must be 1, 2 or 3");
    if (!(side > 0.0) || !std::isfinite(side)) bad("side: must be a positive number");
    if (anchor_counts.empty()) bad("anchors: grid must not be empty");
    for (int m : anchor_counts)
        if (m < 2) bad("anchors: every anchor count must be >= 2");
    if (target_count < 1) bad("targets: must be >= 1");
    if (noise_grid.empty()) bad(std::string(noise_key(kind)) + ": grid must not be empty");
    for (double v : noise_grid) {
        if (!std::isfinite(v) || v < 0.0) bad(std::string(noise_key(kind)) + ": values must be finite and >= 0");
        if (kind == ExperimentKind::Rss && v < exponent_min) bad("g-max: every value must be >= g-min");
    }
    if (kind == ExperimentKind::Rss && !(exponent_min >= 2.0)) bad("g-min: must be >= 2");
    if (!(calibration_exponent > 0.0)) bad("calibration-g: must be positive");
    if (!(transmit_power > 0.0)) bad("p-t: must be positive");
    if (!(alpha > 0.0)) bad("alpha: must be positive");
    if (!(speed > 0.0)) bad("speed: must be positive");
    if (trials < 1) bad("trials: must be >= 1");
    if (solver.restarts < 1) bad("restarts: must be >= 1");
    if (solver.max_iterations < 1) bad("max-iterations: must be >= 1");
    if (!(solver.gradient_tolerance > 0.0)) bad("tolerance: must be positive");
}

std::vector<GridPoint> grid_points(const ExperimentConfig& config) {
    std::vector<GridPoint> points;
    for (std::size_t a = 0; a < config.anchor_counts.size(); ++a)
        for (std::size_t s = 0; s < config.noise_grid.size(); ++s)
            points.push_back({config.anchor_counts[a], config.noise_grid[s], a, s});
    return points;
}

double kendall_tau(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) fail(ErrorCode::InvalidArgument, "kendall tau inputs differ in length");
    const auto n = u.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "kendall tau is undefined for fewer than 2 points");
    long long score = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double du = u(i) - u(j);
            const double dv = v(i) - v(j);
            score += ((du > 0) - (du < 0)) * ((dv > 0) - (dv < 0));
        }
    }
    return static_cast<double>(score) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

namespace {

struct Scene {
    SensorField field;
    DistanceMatrix distances;
};

Scene sample_scene(const ExperimentConfig& c, int m, Rng& rng) {
    std::uniform_real_distribution<double> coord(0.0, c.side);
    Matrix anchors(c.dimension, m);
    Matrix targets(c.dimension, c.target_count);
    for (Eigen::Index i = 0; i < anchors.size(); ++i) anchors.data()[i] = coord(rng);
    for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] = coord(rng);
    SensorField field(std::move(anchors), std::move(targets));
    DistanceMatrix d = pairwise_distances(field);
    return {std::move(field), std::move(d)};
}

// Squared position errors and tau for one method given its anchor-to-target estimates.
MethodTrial score_method(const std::string& name, const Scene& scene, const Matrix& estimates,
                         const SolverOptions& solver) {
    MethodTrial out;
    out.method = name;
    const Matrix& truth = scene.field.targets();
    const Matrix true_yx = scene.distances.block(Block::YX);
    const BatchLocalization batch = localize_all(scene.field.anchors(), estimates, solver);
    double tau_sum = 0.0;
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
        const auto& col = batch.columns[static_cast<std::size_t>(j)];
        if (!col.result || !col.result->position.allFinite()) {
            out.flagged = true;
            out.note = col.error.empty() ? "non-finite position" : col.error;
            out.squared_errors.clear();
            return out;
        }
        if (col.result->termination == Termination::MaxIterations) {
            out.flagged = true;
            out.note = "solver hit the iteration limit";
        }
        out.squared_errors.push_back((col.result->position - truth.col(j)).squaredNorm());
        tau_sum += kendall_tau(true_yx.col(j), estimates.col(j));
    }
    out.tau = tau_sum / static_cast<double>(truth.cols());
    return out;
}

MethodTrial ordinal_method(const ComparisonTensor& z, const Scene& scene, const SolverOptions& solver) {
    const int m = scene.field.anchor_count();
    try {
        const ProximityMatrix psi = aggregate_proximities(z, m);
        const EstimatedDistanceMatrix est = estimate_distances(psi, scene.distances.block(Block::Y));
        return score_method(kMethodOrdinal, scene, est.values, solver);
    } catch (const std::exception& e) {
        MethodTrial t;
        t.method = kMethodOrdinal;
        t.flagged = true;
        t.note = e.what();
        return t;
    }
}

template <class F>
MethodTrial guarded(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        MethodTrial t;
        t.method = name;
        t.flagged = true;
        t.note = e.what();
        return t;
    }
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& c, const GridPoint& point, std::size_t trial_index) {
    const auto kind_id = static_cast<std::uint64_t>(c.kind) + 1;
    const auto m = static_cast<std::uint64_t>(point.anchors);
    const auto t = static_cast<std::uint64_t>(trial_index);
    Rng geometry = make_stream(c.seed, {kind_id, m, t, 0});
    const std::uint64_t noise_seed = derive_seed(c.seed, {kind_id, m, t, 1});
    SolverOptions solver = c.solver;
    solver.seed = derive_seed(c.seed, {kind_id, m, t, 2});

    const Scene scene = sample_scene(c, point.anchors, geometry);
    const int n_anchor = point.anchors;
    const int order = scene.distances.order();

    TrialOutcome out;
    switch (c.kind) {
        case ExperimentKind::OrdinalNoise: {
            const ComparisonTensor z = tensor_from_distances(scene.distances, {point.noise, noise_seed});
            out.methods.push_back(ordinal_method(z, scene, solver));
            break;
        }
        case ExperimentKind::Rss: {
            RssModel model{c.transmit_power, c.alpha, c.exponent_min, point.noise};
            Rng channel(noise_seed);
            const Matrix exponents = sample_link_exponents(order, c.exponent_min, point.noise, channel);
            const Matrix power = rss_power_matrix(model, scene.distances.values(), exponents);
            const SignalMatrix signals(power, Orientation::DecreasingWithDistance);
            out.methods.push_back(ordinal_method(tensor_from_signals(signals).tensor, scene, solver));
            const auto inverted = [&](bool genie) {
                Matrix est(n_anchor, c.target_count);
                for (int i = 0; i < n_anchor; ++i) {
                    for (int j = 0; j < c.target_count; ++j) {
                        const double g = genie ? exponents(i, n_anchor + j) : c.calibration_exponent;
                        est(i, j) = invert_rss(model, power(i, n_anchor + j), g);
                    }
                }
                return est;
            };
            out.methods.push_back(
                guarded(kMethodFixedG, [&] { return score_method(kMethodFixedG, scene, inverted(false), solver); }));
            out.methods.push_back(
                guarded(kMethodGenie, [&] { return score_method(kMethodGenie, scene, inverted(true), solver); }));
            break;
        }
        case ExperimentKind::Toa: {
            const ToaModel model{c.speed, std::sqrt(point.noise / c.speed)};
            Rng channel(noise_seed);
            const Matrix times = toa_matrix(model, scene.distances.values(), channel);
            const SignalMatrix signals(times, Orientation::IncreasingWithDistance);
            out.methods.push_back(ordinal_method(tensor_from_signals(signals).tensor, scene, solver));
            const Matrix est = c.speed * times.topRightCorner(n_anchor, c.target_count);
            out.methods.push_back(guarded(kMethodUnloc, [&] { return score_method(kMethodUnloc, scene, est, solver); }));
            break;
        }
    }
    return out;
}

const ResultRow& ExperimentResult::row(int anchors, double noise, const std::string& method) const {
    for (const auto& r : rows)
        if (r.anchors == anchors && r.noise == noise && r.method == method) return r;
    fail(ErrorCode::InvalidArgument, "no result row for anchors=" + std::to_string(anchors) + " method=" + method);
}

ExperimentResult run_benchmark(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    const std::vector<GridPoint> points = grid_points(config);
    const std::size_t trials = static_cast<std::size_t>(config.trials);
    const std::size_t total = points.size() * trials;
    std::vector<TrialOutcome> outcomes(total);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            outcomes[i] = run_trial(config, points[i / trials], i % trials);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult result;
    result.config = config;
    result.notes = {
        "kendall tau is computed between true and estimated anchor-to-target distance vectors, averaged over targets",
        "rmse_se is the delta-method standard error sqrt-transformed from mse_se",
        "trials counts trials with a finite estimate; flagged counts trials with a solver or pipeline problem",
    };
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<std::string> methods;
        for (std::size_t t = 0; t < trials; ++t)
            for (const auto& mt : outcomes[p * trials + t].methods)
                if (std::find(methods.begin(), methods.end(), mt.method) == methods.end()) methods.push_back(mt.method);
        for (const auto& name : methods) {
            std::vector<double> errors;
            std::vector<double> taus;
            int flagged = 0;
            int contributing = 0;
            for (std::size_t t = 0; t < trials; ++t) {
                for (const auto& mt : outcomes[p * trials + t].methods) {
                    if (mt.method != name) continue;
                    flagged += mt.flagged;
                    if (mt.squared_errors.empty()) continue;
                    ++contributing;
                    errors.insert(errors.end(), mt.squared_errors.begin(), mt.squared_errors.end());
                    taus.push_back(mt.tau);
                }
            }
            ResultRow row;
            row.anchors = points[p].anchors;
            row.noise = points[p].noise;
            row.method = name;
            row.trials = contributing;
            row.flagged = flagged;
            const auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
                mean = se = std::numeric_limits<double>::quiet_NaN();
                if (v.empty()) return;
                double s = 0.0;
                for (double x : v) s += x;
                mean = s / static_cast<double>(v.size());
                if (v.size() < 2) {
                    se = 0.0;
                    return;
                }
                double ss = 0.0;
                for (double x : v) ss += (x - mean) * (x - mean);
                se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
            };
            mean_se(errors, row.mse, row.mse_se);
            mean_se(taus, row.tau, row.tau_se);
            row.rmse = std::sqrt(row.mse);
            row.rmse_se = row.rmse > 0.0 ? row.mse_se / (2.0 * row.rmse) : 0.0;
            if (10 * flagged > static_cast<int>(trials)) result.reliable = false;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

ExperimentResult rss_comparison_suite(const ExperimentConfig& config, unsigned threads) {
    if (config.kind != ExperimentKind::Rss) fail(ErrorCode::Config, "rss comparison suite needs kind=rss");
    return run_benchmark(config, threads);
}

ExperimentResult toa_comparison_suite(const ExperimentConfig& config, unsigned threads) {
    if (config.kind != ExperimentKind::Toa) fail(ErrorCode::Config, "toa comparison suite needs kind=toa");
    return run_benchmark(config, threads);
}

void write_result_csv(std::ostream& out, const ExperimentResult& result) {
    out << "kind,anchors,noise,method,rmse,rmse_se,mse,mse_se,tau,tau_se,trials,flagged\n";
    const std::string kind = kind_name(result.config.kind);
    for (const auto& r : result.rows) {
        out << kind << ',' << r.anchors << ',' << text::format_double(r.noise) << ',' << r.method << ','
            << text::format_double(r.rmse) << ',' << text::format_double(r.rmse_se) << ','
            << text::format_double(r.mse) << ',' << text::format_double(r.mse_se) << ','
            << text::format_double(r.tau) << ',' << text::format_double(r.tau_se) << ',' << r.trials << ','
            << r.flagged << '\n';
    }
}

void write_result_json(std::ostream& out, const ExperimentResult& result) {
    using nlohmann::ordered_json;
    ordered_json j;
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : config_to_map(result.config)) cfg[k] = v;
    j["config"] = cfg;
    j["reliable"] = result.reliable;
    j["notes"] = result.notes;
    const auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    ordered_json rows = ordered_json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"anchors", r.anchors},
                        {"noise", r.noise},
                        {"method", r.method},
                        {"rmse", num(r.rmse)},
                        {"rmse_se", num(r.rmse_se)},
                        {"mse", num(r.mse)},
                        {"mse_se", num(r.mse_se)},
                        {"tau", num(r.tau)},
                        {"tau_se", num(r.tau_se)},
                        {"trials", r.trials},
                        {"flagged", r.flagged}});
    }
    j["rows"] = rows;
    out << j.dump(2) << '\n';
}

// ---- configuration text ----

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + text::format_double(v[i]);
    return s;
}

std::vector<std::string_view> split_list(const std::string& text) {
    std::vector<std::string_view> items;
    for (auto item : text::split(text)) items.push_back(item);
    return items;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    const auto range = text::split(s, ':');
    if (range.size() == 3) {
        const auto a = text::parse_int(range[0]);
        const auto b = text::parse_int(range[1]);
        const auto st = text::parse_int(range[2]);
        if (!a || !b || !st || *st <= 0 || *b < *a) fail(ErrorCode::Config, "bad integer range '" + s + "'");
        for (auto v = *a; v <= *b; v += *st) out.push_back(static_cast<int>(v));
        return out;
    }
    for (auto item : split_list(s)) {
        const auto v = text::parse_int(item);
        if (!v) fail(ErrorCode::Config, "bad integer '" + std::string(item) + "' in list '" + s + "'");
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    const auto range = text::split(s, ':');
    if (range.size() == 3) {
        const auto a = text::parse_double(range[0]);
        const auto b = text::parse_double(range[1]);
        const auto st = text::parse_double(range[2]);
        if (!a || !b || !st || !(*st > 0) || *b < *a) fail(ErrorCode::Config, "bad range '" + s + "'");
        const auto count = static_cast<long>(std::floor((*b - *a) / *st + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(*a + static_cast<double>(i) * *st);
        return out;
    }
    for (auto item : split_list(s)) {
        const auto v = text::parse_double(item);
        if (!v) fail(ErrorCode::Config, "bad number '" + std::string(item) + "' in list '" + s + "'");
        out.push_back(*v);
    }
    return out;
}

ConfigMap parse_config_text(const std::string& content, const std::string& source) {
    ConfigMap values;
    std::istringstream in(content);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::is_comment_or_blank(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::Config, source + ":" + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key(text::trim(std::string_view(line).substr(0, eq)));
        const std::string value(text::trim(std::string_view(line).substr(eq + 1)));
        if (key.empty()) fail(ErrorCode::Config, source + ":" + std::to_string(number) + ": empty key");
        values[key] = value;
    }
    return values;
}

ExperimentConfig config_from_map(const ConfigMap& values) {
    ExperimentKind kind = ExperimentKind::OrdinalNoise;
    if (auto it = values.find("kind"); it != values.end()) kind = parse_kind(it->second);
    ExperimentConfig c = ExperimentConfig::defaults(kind);

    const auto num = [](const std::string& key, const std::string& v) {
        const auto d = text::parse_double(v);
        if (!d) fail(ErrorCode::Config, key + ": expected a number, got '" + v + "'");
        return *d;
    };
    const auto integer = [](const std::string& key, const std::string& v) {
        const auto d = text::parse_int(v);
        if (!d) fail(ErrorCode::Config, key + ": expected an integer, got '" + v + "'");
        return *d;
    };
    const auto with_key = [](const std::string& key, auto&& f) {
        try {
            return f();
        } catch (const Error& e) {
            fail(ErrorCode::Config, key + ": " + e.what());
        }
    };

    for (const auto& [key, v] : values) {
        if (key == "kind") continue;
        if (key == "dimension") c.dimension = static_cast<int>(integer(key, v));
        else if (key == "side") c.side = num(key, v);
        else if (key == "anchors") c.anchor_counts = with_key(key, [&] { return parse_int_list(v); });
        else if (key == "targets") c.target_count = static_cast<int>(integer(key, v));
        else if (key == noise_key(kind) || key == "noise")
            c.noise_grid = with_key(key, [&] { return parse_double_list(v); });
        else if (key == "g-min") c.exponent_min = num(key, v);
        else if (key == "calibration-g") c.calibration_exponent = num(key, v);
        else if (key == "p-t") c.transmit_power = num(key, v);
        else if (key == "alpha") c.alpha = num(key, v);
        else if (key == "speed") c.speed = num(key, v);
        else if (key == "trials") c.trials = static_cast<int>(integer(key, v));
        else if (key == "seed") {
            const auto s = text::parse_int(v);
            std::uint64_t seed = 0;
            if (s && *s >= 0) seed = static_cast<std::uint64_t>(*s);
            else {
                const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
                if (ec != std::errc() || p != v.data() + v.size()) {
                    fail(ErrorCode::Config, "seed: expected a non-negative integer, got '" + v + "'");
                }
            }
            c.seed = seed;
        } else if (key == "restarts") c.solver.restarts = static_cast<int>(integer(key, v));
        else if (key == "max-iterations") c.solver.max_iterations = static_cast<int>(integer(key, v));
        else if (key == "tolerance") c.solver.gradient_tolerance = num(key, v);
        else if (key == "delta") {
            if (v == "squared") c.solver.delta_mode = DeltaMode::Squared;
            else if (v == "raw") c.solver.delta_mode = DeltaMode::Raw;
            else fail(ErrorCode::Config, "delta: expected 'squared' or 'raw', got '" + v + "'");
        } else {
            fail(ErrorCode::Config, "unknown configuration key '" + key + "' for kind " + kind_name(kind));
        }
    }
    c.validate();
    return c;
}

ConfigMap config_to_map(const ExperimentConfig& c) {
    ConfigMap m;
    m["kind"] = kind_name(c.kind);
    m["dimension"] = std::to_string(c.dimension);
    m["side"] = text::format_double(c.side);
    std::string anchors;
    for (std::size_t i = 0; i < c.anchor_counts.size(); ++i) anchors += (i ? "," : "") + std::to_string(c.anchor_counts[i]);
    m["anchors"] = anchors;
    m["targets"] = std::to_string(c.target_count);
    m[noise_key(c.kind)] = join_doubles(c.noise_grid);
    if (c.kind == ExperimentKind::Rss) {
        m["g-min"] = text::format_double(c.exponent_min);
        m["calibration-g"] = text::format_double(c.calibration_exponent);
        m["p-t"] = text::format_double(c.transmit_power);
        m["alpha"] = text::format_double(c.alpha);
    }
    if (c.kind == ExperimentKind::Toa) m["speed"] = text::format_double(c.speed);
    m["trials"] = std::to_string(c.trials);
    m["seed"] = std::to_string(c.seed);
    m["restarts"] = std::to_string(c.solver.restarts);
    m["max-iterations"] = std::to_string(c.solver.max_iterations);
    m["tolerance"] = text::format_double(c.solver.gradient_tolerance);
    m["delta"] = c.solver.delta_mode == DeltaMode::Squared ? "squared" : "raw";
    return m;
}

std::string config_to_text(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [k, v] : config_to_map(config)) out += k + " = " + v + "\n";
    return out;
}

}  // namespace ounloc

// Command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ounloc/ounloc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

int exit_code(ounloc_status status) {
    switch (status) {
        case OUNLOC_OK: return kExitOk;
        case OUNLOC_ERR_CONFIG:
        case OUNLOC_ERR_INVALID_ARGUMENT: return kExitConfig;
        case OUNLOC_ERR_INPUT:
        case OUNLOC_ERR_IO: return kExitInput;
        default: return kExitNumerical;
    }
}

struct Failure {
    int code;
    std::string message;
};

void check(ounloc_status status, const std::string& context) {
    if (status != OUNLOC_OK) {
        throw Failure{exit_code(status), context + ": " + ounloc_last_error()};
    }
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::map<std::string, std::string> parse_resolved(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

struct ConfigHandle {
    ounloc_config* ptr = nullptr;
    ~ConfigHandle() { ounloc_config_destroy(ptr); }
};

struct ResultHandle {
    ounloc_result* ptr = nullptr;
    ~ResultHandle() { ounloc_result_destroy(ptr); }
};

// Experiment flags shared by `simulate` and `benchmark`; empty values are left unset.
struct ExperimentFlags {
    std::string config_file;
    std::string out_prefix;
    unsigned threads = 0;
    std::map<std::string, std::string> values;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--config", config_file, "Key-value config file or a previous run manifest (JSON)");
        cmd.add_option("--out", out_prefix, "Output prefix: writes PREFIX.csv, PREFIX.json, PREFIX.manifest.json");
        cmd.add_option("--threads", threads, "Worker threads (default: all cores; results do not depend on it)");
        static const std::vector<std::pair<std::string, std::string>> keys{
            {"kind", "Experiment kind: ordinal, rss or toa"},
            {"anchors", "Anchor counts, list a,b,c or range start:stop:step"},
            {"sigma", "Comparison noise std grid (ordinal)"},
            {"variance", "Normalized TOA variance c*sigma_T^2 grid (toa)"},
            {"g-max", "Upper path-loss exponent grid b (rss)"},
            {"g-min", "Lower path-loss exponent a (rss)"},
            {"calibration-g", "Fixed exponent used by the calibrated UNLOC baseline (rss)"},
            {"p-t", "Transmit power in mW (rss)"},
            {"alpha", "Hardware constant (rss)"},
            {"speed", "Propagation speed c (toa)"},
            {"side", "Side length of the square field"},
            {"dimension", "Spatial dimension"},
            {"targets", "Targets per trial"},
            {"trials", "Monte-Carlo trials per grid point"},
            {"seed", "Master seed (drawn from entropy and recorded when omitted)"},
            {"restarts", "Solver restarts"},
            {"max-iterations", "Solver iteration limit per restart"},
            {"tolerance", "Relative gradient tolerance"},
            {"delta", "Unfolding targets: squared (default) or raw distances"},
        };
        for (const auto& [key, help] : keys) {
            cmd.add_option_function<std::string>("--" + key, [this, key = key](const std::string& v) { values[key] = v; },
                                                 help);
        }
    }
};

void load_config_file(ounloc_config* cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{kExitConfig, "cannot open config file '" + path + "'"};
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw Failure{kExitConfig, path + ": invalid manifest JSON: " + e.what()};
        }
        if (!manifest.contains("config") || !manifest["config"].is_object()) {
            throw Failure{kExitConfig, path + ": manifest has no 'config' object"};
        }
        for (const auto& [k, v] : manifest["config"].items()) {
            check(ounloc_config_set(cfg, k.c_str(), v.get<std::string>().c_str()), path);
        }
        return;
    }
    check(ounloc_config_load_file(cfg, path.c_str()), "config");
}

int run_experiment(const std::string& command, ExperimentFlags& flags, const std::vector<std::string>& allowed_kinds,
                   const std::string& default_kind) {
    const std::string started = utc_now();
    ConfigHandle cfg;
    check(ounloc_config_create(default_kind.c_str(), &cfg.ptr), "config");
    if (!flags.config_file.empty()) load_config_file(cfg.ptr, flags.config_file);
    if (auto it = flags.values.find("kind"); it != flags.values.end()) {
        check(ounloc_config_set(cfg.ptr, "kind", it->second.c_str()), "--kind");
    }
    for (const auto& [k, v] : flags.values) {
        if (k != "kind") check(ounloc_config_set(cfg.ptr, k.c_str(), v.c_str()), "--" + k);
    }
    const char* kind = nullptr;
    check(ounloc_config_kind(cfg.ptr, &kind), "config");
    if (std::find(allowed_kinds.begin(), allowed_kinds.end(), kind) == allowed_kinds.end()) {
        throw Failure{kExitConfig, command + ": unsupported kind '" + std::string(kind) + "'"};
    }

    char* resolved_text = nullptr;
    check(ounloc_config_resolve(cfg.ptr, &resolved_text), "config");
    auto resolved = parse_resolved(resolved_text);
    ounloc_string_free(resolved_text);
    bool seed_drawn = false;
    if (!ounloc_config_has(cfg.ptr, "seed")) {
        std::random_device rd;
        const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        check(ounloc_config_set(cfg.ptr, "seed", std::to_string(seed).c_str()), "seed");
        check(ounloc_config_resolve(cfg.ptr, &resolved_text), "config");
        resolved = parse_resolved(resolved_text);
        ounloc_string_free(resolved_text);
        seed_drawn = true;
    }

    ResultHandle result;
    check(ounloc_benchmark_run(cfg.ptr, flags.threads, &result.ptr), command);

    const std::string prefix = flags.out_prefix.empty() ? "ounloc_" + std::string(kind) : flags.out_prefix;
    const std::string csv = prefix + ".csv";
    const std::string json = prefix + ".json";
    const std::string manifest_path = prefix + ".manifest.json";
    check(ounloc_result_write_csv(result.ptr, csv.c_str()), "write");
    check(ounloc_result_write_json(result.ptr, json.c_str()), "write");

    const bool reliable = ounloc_result_reliable(result.ptr) != 0;
    nlohmann::ordered_json manifest;
    manifest["command"] = command;
    manifest["version"] = ounloc_version();
    manifest["config"] = resolved;
    manifest["seed"] = resolved["seed"];
    manifest["seed_source"] = seed_drawn ? "entropy" : "user";
    manifest["threads"] = flags.threads;
    manifest["started_utc"] = started;
    manifest["finished_utc"] = utc_now();
    manifest["reliable"] = reliable;
    manifest["outputs"] = {csv, json};
    {
        std::ofstream out(manifest_path);
        out << manifest.dump(2) << '\n';
        if (!out) throw Failure{kExitInput, "cannot write '" + manifest_path + "'"};
    }

    const size_t rows = ounloc_result_row_count(result.ptr);
    for (size_t i = 0; i < rows; ++i) {
        ounloc_result_row r;
        check(ounloc_result_row_at(result.ptr, i, &r), "result");
        std::cout << "m=" << r.anchors << " noise=" << r.noise << " " << r.method << " rmse=" << r.rmse << " (se "
                  << r.rmse_se << ") tau=" << r.tau << " trials=" << r.trials << "\n";
    }
    std::cout << "wrote " << csv << ", " << json << ", " << manifest_path << "\n";
    if (!reliable) {
        std::cerr << "warning: more than 10% of trials were flagged at some grid point; result is unreliable\n";
        return kExitNumerical;
    }
    return kExitOk;
}

struct LocalizeFlags {
    std::string measurements;
    std::string field;
    std::string out = "positions.csv";
    double keep_fraction = 0.01;
    std::string aggregator = "median";
    int sample = 0;
    int restarts = 8;
    std::optional<std::uint64_t> seed;
    std::string delta = "squared";
};

int run_localize(const LocalizeFlags& f) {
    ounloc_measurements* set = nullptr;
    check(ounloc_measurements_load(f.measurements.c_str(), &set), "measurements");
    std::unique_ptr<ounloc_measurements, decltype(&ounloc_measurements_destroy)> guard(set, ounloc_measurements_destroy);
    if (!f.field.empty()) check(ounloc_measurements_apply_field(set, f.field.c_str()), "field");
    if (ounloc_measurements_anchor_count(set) < 2) throw Failure{kExitInput, "localize: need at least 2 anchors"};

    ounloc_localize_options opts;
    ounloc_localize_options_init(&opts);
    opts.keep_fraction = f.keep_fraction;
    if (f.aggregator == "median") opts.aggregator = OUNLOC_AGGREGATE_MEDIAN;
    else if (f.aggregator == "mean") opts.aggregator = OUNLOC_AGGREGATE_MEAN;
    else if (f.aggregator == "sample") opts.aggregator = OUNLOC_AGGREGATE_SAMPLE;
    else throw Failure{kExitConfig, "--aggregator must be median, mean or sample"};
    opts.sample_index = f.sample;
    opts.restarts = f.restarts;
    opts.seed = f.seed.value_or(0);
    if (f.delta != "squared" && f.delta != "raw") throw Failure{kExitConfig, "--delta must be squared or raw"};
    opts.raw_delta = f.delta == "raw";

    ounloc_localization* loc = nullptr;
    check(ounloc_localize_measurements(set, &opts, &loc), "localize");
    std::unique_ptr<ounloc_localization, decltype(&ounloc_localization_destroy)> loc_guard(loc,
                                                                                          ounloc_localization_destroy);
    for (size_t i = 0; i < ounloc_localization_warning_count(loc); ++i) {
        std::cerr << "warning: " << ounloc_localization_warning_at(loc, i) << "\n";
    }
    check(ounloc_localization_write_csv(loc, f.out.c_str()), "write");
    for (size_t i = 0; i < ounloc_localization_row_count(loc); ++i) {
        ounloc_position_row r;
        check(ounloc_localization_row_at(loc, i, &r), "localize");
        if (std::string(r.mode) == "sample") continue;
        std::cout << r.target_id << " " << r.mode << " (";
        for (int c = 0; c < r.dimension; ++c) std::cout << (c ? ", " : "") << r.position[c];
        std::cout << ")";
        if (r.has_error) std::cout << " error=" << r.error;
        std::cout << "\n";
    }
    std::cout << "wrote " << f.out << "\n";
    return kExitOk;
}

const char* kCsvHelp =
    "Experiment CSV columns (simulate, benchmark):\n"
    "  kind,anchors,noise,method,rmse,rmse_se,mse,mse_se,tau,tau_se,trials,flagged\n"
    "  noise is sigma (ordinal), c*sigma_T^2 (toa) or the upper exponent b (rss).\n"
    "  methods: ordinal_unloc; rss adds unloc_fixed_g and unloc_genie; toa adds unloc.\n"
    "Localize CSV columns:\n"
    "  target_id,mode,sample,x,y[,z],error   (mode: estimate | sample | average)\n"
    "Exit codes: 0 ok, 1 config/usage error, 2 input-file error, 3 numerical failure.";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ordinal UNLOC: localization from one-bit distance comparisons"};
    app.footer(kCsvHelp);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ounloc_version()));

    ExperimentFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation (ordinal, rss or toa)");
    sim_flags.add_to(*simulate);

    ExperimentFlags bench_flags;
    auto* benchmark = app.add_subcommand("benchmark", "Method comparison suites for rss and toa");
    bench_flags.add_to(*benchmark);

    LocalizeFlags loc_flags;
    auto* localize = app.add_subcommand("localize", "Localize targets from a measurement file");
    localize->add_option("measurements", loc_flags.measurements, "Measurement file (roster, ---, records)")->required();
    localize->add_option("--field", loc_flags.field, "Sensor field file: anchor coordinates and target ground truth");
    localize->add_option("--out", loc_flags.out, "Output positions CSV");
    localize->add_option("--keep-fraction", loc_flags.keep_fraction, "Fraction of strongest records kept per link")
        ->check(CLI::Range(1e-12, 1.0));
    localize->add_option("--aggregator", loc_flags.aggregator, "median, mean or sample");
    localize->add_option("--sample", loc_flags.sample, "Sample index for --aggregator sample (0 = all, then average)")
        ->check(CLI::NonNegativeNumber);
    localize->add_option("--restarts", loc_flags.restarts, "Solver restarts")->check(CLI::PositiveNumber);
    localize->add_option("--seed", loc_flags.seed, "Solver seed");
    localize->add_option("--delta", loc_flags.delta, "Unfolding targets: squared or raw");

    std::string synth_field;
    std::string synth_out = "measurements.csv";
    int synth_samples = 100;
    double synth_gmin = 2.0;
    double synth_gmax = 6.0;
    std::uint64_t synth_seed = 1;
    auto* synth = app.add_subcommand("synth", "Write a synthetic RSSI measurement file for a sensor field");
    synth->add_option("field", synth_field, "Sensor field file with coordinates for every sensor")->required();
    synth->add_option("--out", synth_out, "Output measurement file");
    synth->add_option("--samples", synth_samples, "Records per directed link")->check(CLI::PositiveNumber);
    synth->add_option("--g-min", synth_gmin, "Lower path-loss exponent");
    synth->add_option("--g-max", synth_gmax, "Upper path-loss exponent");
    synth->add_option("--seed", synth_seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*simulate) return run_experiment("simulate", sim_flags, {"ordinal", "rss", "toa"}, "ordinal");
        if (*benchmark) return run_experiment("benchmark", bench_flags, {"rss", "toa"}, "rss");
        if (*localize) return run_localize(loc_flags);
        if (*synth) {
            check(ounloc_measurements_synthesize(synth_field.c_str(), synth_samples, synth_gmin, synth_gmax, synth_seed,
                                                 synth_out.c_str()),
                  "synth");
            std::cout << "wrote " << synth_out << "\n";
            return kExitOk;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return kExitConfig;
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ounloc/core.hpp"
#include "ounloc/unfold.hpp"

namespace ounloc {

enum class ExperimentKind {
    OrdinalNoise,  // comparisons of true distances under Gaussian noise
    Rss,           // received power with per-link path-loss exponents
    Toa,           // noisy time of arrival
};

const char* kind_name(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

inline constexpr const char* kMethodOrdinal = "ordinal_unloc";
inline constexpr const char* kMethodFixedG = "unloc_fixed_g";
inline constexpr const char* kMethodGenie = "unloc_genie";
inline constexpr const char* kMethodUnloc = "unloc";

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::OrdinalNoise;
    int dimension = 2;
    double side = 1.0;
    std::vector<int> anchor_counts{5, 10, 15, 20};
    int target_count = 1;
    // sigma (ordinal), normalized variance c * sigma_T^2 (toa) or upper exponent b (rss).
    std::vector<double> noise_grid{0.0, 0.1, 0.3, 0.5};
    double exponent_min = 2.0;
    double calibration_exponent = 4.0;
    double transmit_power = 1.0;
    double alpha = 1.0;
    double speed = 1.0;
    int trials = 2000;
    std::uint64_t seed = 0;
    SolverOptions solver;

    void validate() const;
    // Defaults for the given kind (grid, field size) as used by the command line.
    static ExperimentConfig defaults(ExperimentKind kind);
};

struct GridPoint {
    int anchors = 0;
    double noise = 0.0;
    std::size_t anchor_index = 0;
    std::size_t noise_index = 0;
};

std::vector<GridPoint> grid_points(const ExperimentConfig& config);

struct MethodTrial {
    std::string method;
    std::vector<double> squared_errors;  // one per target
    double tau = 0.0;                    // mean Kendall tau over targets
    bool flagged = false;
    std::string note;
};

struct TrialOutcome {
    std::vector<MethodTrial> methods;
};

// One Monte-Carlo trial at a grid point; deterministic in (seed, grid point, trial index).
TrialOutcome run_trial(const ExperimentConfig& config, const GridPoint& point, std::size_t trial_index);

struct ResultRow {
    int anchors = 0;
    double noise = 0.0;
    std::string method;
    double rmse = 0.0;
    double rmse_se = 0.0;
    double mse = 0.0;
    double mse_se = 0.0;
    double tau = 0.0;
    double tau_se = 0.0;
    int trials = 0;
    int flagged = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    bool reliable = true;
    std::vector<std::string> notes;

    const ResultRow& row(int anchors, double noise, const std::string& method) const;
};

// threads == 0 uses the hardware concurrency. The result does not depend on the thread count.
ExperimentResult run_benchmark(const ExperimentConfig& config, unsigned threads = 0);
ExperimentResult rss_comparison_suite(const ExperimentConfig& config, unsigned threads = 0);
ExperimentResult toa_comparison_suite(const ExperimentConfig& config, unsigned threads = 0);

// tau-a over all pairs; ties contribute zero.
double kendall_tau(const Vector& u, const Vector& v);

void write_result_csv(std::ostream& out, const ExperimentResult& result);
void write_result_json(std::ostream& out, const ExperimentResult& result);

// Flat `key = value` configuration mirroring the command-line flag names.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text, const std::string& source);
ExperimentConfig config_from_map(const ConfigMap& values);
ConfigMap config_to_map(const ExperimentConfig& config);
std::string config_to_text(const ExperimentConfig& config);

// Accepts "a,b,c" lists or "start:stop:step" ranges.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace ounloc

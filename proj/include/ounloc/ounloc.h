#ifndef OUNLOC_OUNLOC_H
#define OUNLOC_OUNLOC_H

/*
 * C interface to the ordinal localization library.
 *
 * Every function returns an ounloc_status. On failure the thread's last error message is
 * available from ounloc_last_error() until the next call on the same thread. Objects are
 * opaque handles created by *_create / *_load / *_run functions and released with the
 * matching *_destroy function; passing NULL to a destroy function is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OUNLOC_BUILDING_LIBRARY)
#    define OUNLOC_API __declspec(dllexport)
#  else
#    define OUNLOC_API __declspec(dllimport)
#  endif
#else
#  define OUNLOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ounloc_status {
    OUNLOC_OK = 0,
    OUNLOC_ERR_CONFIG = 1,           /* invalid configuration value or key */
    OUNLOC_ERR_INPUT = 2,            /* unreadable or malformed input file */
    OUNLOC_ERR_NUMERICAL = 3,        /* numerical failure */
    OUNLOC_ERR_INVALID_ARGUMENT = 4, /* bad argument to an API call */
    OUNLOC_ERR_IO = 5,               /* output could not be written */
    OUNLOC_ERR_INTERNAL = 6
} ounloc_status;

OUNLOC_API const char* ounloc_version(void);
OUNLOC_API const char* ounloc_last_error(void);
OUNLOC_API const char* ounloc_status_name(ounloc_status status);

/* Strings returned through char** out-parameters are released with this. */
OUNLOC_API void ounloc_string_free(char* s);

/* ---- experiment configuration ---------------------------------------------------------- */

typedef struct ounloc_config ounloc_config;

/* kind: "ordinal", "rss" or "toa". Starts from that kind's defaults. */
OUNLOC_API ounloc_status ounloc_config_create(const char* kind, ounloc_config** out);
OUNLOC_API void ounloc_config_destroy(ounloc_config* config);
/* Keys mirror the command-line flag names (anchors, sigma, trials, seed, ...). Setting "kind"
 * resets the grid defaults for keys not set explicitly. Values are validated on use. */
OUNLOC_API ounloc_status ounloc_config_set(ounloc_config* config, const char* key, const char* value);
/* Reads `key = value` lines. */
OUNLOC_API ounloc_status ounloc_config_load_file(ounloc_config* config, const char* path);
/* Validates and reports the fully resolved configuration as `key = value` lines. */
OUNLOC_API ounloc_status ounloc_config_resolve(const ounloc_config* config, char** text_out);
OUNLOC_API ounloc_status ounloc_config_kind(const ounloc_config* config, const char** kind_out);
/* 1 when the key was set explicitly (by ounloc_config_set or a loaded file), else 0. */
OUNLOC_API int ounloc_config_has(const ounloc_config* config, const char* key);

/* ---- benchmark results ------------------------------------------------------------------ */

typedef struct ounloc_result ounloc_result;

typedef struct ounloc_result_row {
    int anchors;
    double noise;
    const char* method; /* valid while the result lives */
    double rmse;
    double rmse_se;
    double mse;
    double mse_se;
    double tau;
    double tau_se;
    int trials;
    int flagged;
} ounloc_result_row;

/* threads == 0 uses every available core; the result does not depend on it. */
OUNLOC_API ounloc_status ounloc_benchmark_run(const ounloc_config* config, unsigned threads, ounloc_result** out);
OUNLOC_API void ounloc_result_destroy(ounloc_result* result);
OUNLOC_API int ounloc_result_reliable(const ounloc_result* result);
OUNLOC_API size_t ounloc_result_row_count(const ounloc_result* result);
OUNLOC_API ounloc_status ounloc_result_row_at(const ounloc_result* result, size_t index, ounloc_result_row* out);
OUNLOC_API ounloc_status ounloc_result_write_csv(const ounloc_result* result, const char* path);
OUNLOC_API ounloc_status ounloc_result_write_json(const ounloc_result* result, const char* path);

/* ---- measurement files ------------------------------------------------------------------ */

typedef struct ounloc_measurements ounloc_measurements;

OUNLOC_API ounloc_status ounloc_measurements_load(const char* path, ounloc_measurements** out);
OUNLOC_API void ounloc_measurements_destroy(ounloc_measurements* set);
/* Overrides anchor coordinates and adds target ground truth from a sensor field file. */
OUNLOC_API ounloc_status ounloc_measurements_apply_field(ounloc_measurements* set, const char* field_path);
OUNLOC_API size_t ounloc_measurements_anchor_count(const ounloc_measurements* set);
OUNLOC_API size_t ounloc_measurements_target_count(const ounloc_measurements* set);
OUNLOC_API size_t ounloc_measurements_record_count(const ounloc_measurements* set);

/* Writes a synthetic log-distance RSSI measurement file for the sensors (all with coordinates)
 * in field_path; each record draws its own exponent from [g_min, g_max]. */
OUNLOC_API ounloc_status ounloc_measurements_synthesize(const char* field_path, int samples_per_link, double g_min,
                                                        double g_max, uint64_t seed, const char* out_path);

typedef enum ounloc_aggregator {
    OUNLOC_AGGREGATE_MEDIAN = 0,
    OUNLOC_AGGREGATE_MEAN = 1,
    OUNLOC_AGGREGATE_SAMPLE = 2
} ounloc_aggregator;

typedef struct ounloc_localize_options {
    double keep_fraction;
    ounloc_aggregator aggregator;
    int sample_index; /* SAMPLE only; 0 = every sample, then average */
    int restarts;
    int max_iterations;
    double tolerance;
    uint64_t seed;
    int raw_delta; /* nonzero: use distances, not squared distances, as unfolding targets */
} ounloc_localize_options;

OUNLOC_API void ounloc_localize_options_init(ounloc_localize_options* options);

typedef struct ounloc_localization ounloc_localization;

typedef struct ounloc_position_row {
    const char* target_id; /* valid while the localization lives */
    const char* mode;      /* "estimate", "sample" or "average" */
    int sample;            /* sample index, or number of estimates averaged */
    int dimension;
    double position[3];
    int has_error;
    double error;
} ounloc_position_row;

OUNLOC_API ounloc_status ounloc_localize_measurements(const ounloc_measurements* set,
                                                      const ounloc_localize_options* options,
                                                      ounloc_localization** out);
OUNLOC_API void ounloc_localization_destroy(ounloc_localization* loc);
OUNLOC_API size_t ounloc_localization_row_count(const ounloc_localization* loc);
OUNLOC_API ounloc_status ounloc_localization_row_at(const ounloc_localization* loc, size_t index,
                                                    ounloc_position_row* out);
OUNLOC_API size_t ounloc_localization_warning_count(const ounloc_localization* loc);
OUNLOC_API const char* ounloc_localization_warning_at(const ounloc_localization* loc, size_t index);
OUNLOC_API ounloc_status ounloc_localization_write_csv(const ounloc_localization* loc, const char* path);

/* ---- array-level pipeline --------------------------------------------------------------- */

/* Ordinal localization from a dense N x N signal matrix (row-major, N = m + n, anchors first).
 * anchors: m x q row-major coordinates. present: optional N x N mask (row-major, nonzero =
 * measured); NULL means every off-diagonal entry is present. increasing: nonzero when the
 * signal grows with distance (time of arrival), zero when it shrinks (received power).
 * positions_out receives n x q row-major estimates. */
OUNLOC_API ounloc_status ounloc_localize_signals(size_t dimension, size_t anchor_count, size_t target_count,
                                                 const double* anchors, const double* signals,
                                                 const unsigned char* present, int increasing,
                                                 const ounloc_localize_options* options, double* positions_out);

#ifdef __cplusplus
}
#endif

#endif /* OUNLOC_OUNLOC_H */

/* Copyright 2026 The tvgan Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the tvgan library. Functions return a tvgan_status; on
 * failure tvgan_last_error() describes the problem for the calling thread.
 * Strings returned through `char**` out-parameters are owned by the caller
 * and released with tvgan_string_free().
 */

#ifndef TVGAN_TVGAN_H_
#define TVGAN_TVGAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TVGAN_BUILDING_LIBRARY)
#define TVGAN_API __declspec(dllexport)
#else
#define TVGAN_API __declspec(dllimport)
#endif
#else
#define TVGAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tvgan_status {
  TVGAN_OK = 0,
  TVGAN_INVALID_ARGUMENT = 1, /* null pointer or malformed argument */
  TVGAN_CONFIG = 2,           /* configuration rejected; see tvgan_last_error_field */
  TVGAN_IO = 3,               /* file missing, unreadable or malformed */
  TVGAN_EXPLODED = 4,         /* training stopped by the explosion detector */
  TVGAN_INTERNAL = 5
} tvgan_status;

typedef struct tvgan_config tvgan_config;

TVGAN_API const char* tvgan_version(void);
TVGAN_API const char* tvgan_last_error(void);
/* Field path of the last TVGAN_CONFIG error, or "" otherwise. */
TVGAN_API const char* tvgan_last_error_field(void);
TVGAN_API void tvgan_string_free(char* s);

/* ---- configuration ---- */

TVGAN_API tvgan_status tvgan_config_from_preset(const char* name, tvgan_config** out);
TVGAN_API tvgan_status tvgan_config_parse(const char* text, tvgan_config** out);
TVGAN_API tvgan_status tvgan_config_load(const char* path, tvgan_config** out);
/* Sets one field and revalidates; the config is unchanged on failure. */
TVGAN_API tvgan_status tvgan_config_set(tvgan_config* config, const char* key, const char* value);
TVGAN_API tvgan_status tvgan_config_get(const tvgan_config* config, const char* key, char** out);
TVGAN_API tvgan_status tvgan_config_serialize(const tvgan_config* config, char** out);
TVGAN_API void tvgan_config_free(tvgan_config* config);

TVGAN_API size_t tvgan_preset_count(void);
/* Name and description of preset `index`; pointers stay valid for the
 * lifetime of the process. */
TVGAN_API tvgan_status tvgan_preset_info(size_t index, const char** name, const char** description);

/* ---- runs ---- */

typedef struct tvgan_run_summary {
  int exploded;
  int64_t generator_steps;
  int64_t critic_steps;
  int has_eval; /* 0 when the run exploded */
  double w1;
  double w1_baseline;
  size_t modes_captured;
  double is_analog_mean;
  double is_analog_std;
  double max_gap;
} tvgan_run_summary;

/* Trains into out_dir. Returns TVGAN_EXPLODED (with *summary filled) when
 * the explosion detector stopped the run. */
TVGAN_API tvgan_status tvgan_train(const tvgan_config* config, const char* out_dir, tvgan_run_summary* summary);

/* Sweeps `param` over `values` for each seed. The aggregate table (CSV) is
 * returned in *aggregate_csv when it is not NULL. */
TVGAN_API tvgan_status tvgan_sweep(const tvgan_config* base, const char* param, const char* const* values,
                                   size_t n_values, const uint64_t* seeds, size_t n_seeds, const char* out_dir,
                                   size_t workers, char** aggregate_csv);

typedef struct tvgan_scenario {
  int homogeneous;
  double lr;
} tvgan_scenario;

/* Compares models ("tv", "gp", "clip", "none", "vanilla" or preset names).
 * steps <= 0 keeps the preset length. The ranking table (CSV) is returned in
 * *ranking_csv when it is not NULL. */
TVGAN_API tvgan_status tvgan_compare(const char* const* models, size_t n_models, const tvgan_scenario* scenarios,
                                     size_t n_scenarios, const uint64_t* seeds, size_t n_seeds, int64_t steps,
                                     const char* out_dir, size_t workers, char** ranking_csv);

/* Plot table for a run directory; kind is loss, gap, lipschitz, hist or
 * scatter. */
TVGAN_API tvgan_status tvgan_plotdata(const char* run_dir, const char* kind, char** table);

/* One JSON object per checkpoint, newline separated. */
TVGAN_API tvgan_status tvgan_eval(const char* run_dir, size_t workers, char** jsonl);

#ifdef __cplusplus
}
#endif

#endif /* TVGAN_TVGAN_H_ */

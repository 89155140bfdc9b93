/* Stable C interface to the ERL library. All objects are opaque handles
 * owned by the caller and released with the matching *_free function.
 * Every fallible call returns an erl_status; on failure erl_last_error()
 * describes the problem for the calling thread. */
#ifndef ERL_C_API_H
#define ERL_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ERL_API __declspec(dllexport)
#else
#define ERL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erl_status {
  ERL_OK = 0,
  ERL_ERROR_NULL_ARGUMENT = 1,
  ERL_ERROR_INPUT = 2,
  ERL_ERROR_STATE = 3,
  ERL_ERROR_NUMERIC = 4,
  ERL_ERROR_USAGE = 5,
  ERL_ERROR_CONFIG = 6,
  ERL_ERROR_IO = 7,
  ERL_ERROR_BUFFER_TOO_SMALL = 8,
  ERL_ERROR_INTERNAL = 9
} erl_status;

typedef enum erl_sync_class {
  ERL_SYNC_NONE = 0,
  ERL_SYNC_ELITE = 1,
  ERL_SYNC_SELECTED = 2,
  ERL_SYNC_DISCARDED = 3
} erl_sync_class;

typedef struct erl_config erl_config;
typedef struct erl_trainer erl_trainer;

typedef struct erl_generation_report {
  uint64_t generation;
  uint64_t cumulative_steps;
  double best_fitness;
  double mean_fitness;
  double champion_score;
  erl_sync_class sync_classification;
  uint64_t updates;
} erl_generation_report;

ERL_API const char* erl_version(void);
ERL_API const char* erl_status_string(erl_status status);
/* Message of the last failed call on this thread ("" if none). */
ERL_API const char* erl_last_error(void);

/* Configuration. */
ERL_API erl_status erl_config_default(erl_config** out);
ERL_API erl_status erl_config_load(const char* path, erl_config** out);
ERL_API erl_status erl_config_from_json(const char* json_text, erl_config** out);
/* Writes the JSON form into buf (NUL-terminated). *needed receives the
 * required size including the terminator; ERL_ERROR_BUFFER_TOO_SMALL if
 * capacity is insufficient. buf may be NULL when capacity is 0. */
ERL_API erl_status erl_config_to_json(const erl_config* cfg, char* buf, size_t capacity, size_t* needed);
ERL_API erl_status erl_config_save(const erl_config* cfg, const char* path);
ERL_API void erl_config_free(erl_config* cfg);

/* Training loop. algo is one of "erl", "ddpg", "ea", "erl-ns". */
ERL_API erl_status erl_trainer_create(const erl_config* cfg, const char* algo, uint64_t seed, erl_trainer** out);
ERL_API erl_status erl_trainer_run_generation(erl_trainer* trainer, erl_generation_report* out);
ERL_API erl_status erl_trainer_cumulative_steps(const erl_trainer* trainer, uint64_t* out);
/* counts[0..2] = elite, selected, discarded. */
ERL_API erl_status erl_trainer_sync_counts(const erl_trainer* trainer, uint64_t counts[3]);
ERL_API void erl_trainer_free(erl_trainer* trainer);

/* Runs one arm to step_budget cumulative steps (0 = use the config's budget)
 * and writes the run directory. */
ERL_API erl_status erl_run_experiment(const erl_config* cfg, const char* algo, uint64_t seed, uint64_t step_budget,
                                      const char* out_dir);

/* Renders the comparison table of run directories into buf, with the same
 * sizing contract as erl_config_to_json. */
ERL_API erl_status erl_compare_runs(const char* const* run_dirs, size_t count, char* buf, size_t capacity,
                                    size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* ERL_C_API_H */

/* C interface to the coldstart engine. All functions returning
 * coldstart_status set a thread-local message retrievable via
 * coldstart_last_error() on failure. Strings returned through char** are
 * heap-allocated and must be released with coldstart_string_free(). */
#ifndef COLDSTART_COLDSTART_H
#define COLDSTART_COLDSTART_H

#include <stdint.h>

#if defined(_WIN32)
#define COLDSTART_API __declspec(dllexport)
#else
#define COLDSTART_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coldstart_status {
  COLDSTART_OK = 0,
  COLDSTART_ERR_INVALID_ARGUMENT = 1,
  COLDSTART_ERR_IO = 2,
  COLDSTART_ERR_PARSE = 3,
  COLDSTART_ERR_CONFIG = 4,
  COLDSTART_ERR_RUN = 5
} coldstart_status;

typedef struct coldstart_pool coldstart_pool;
typedef struct coldstart_trajectory coldstart_trajectory;

typedef struct coldstart_step {
  int64_t step;            /* 1-based position in the episode */
  int64_t instance_id;
  int32_t predicted;
  int32_t truth;
  int32_t correct;         /* 1 if predicted == truth */
  int64_t cumulative_error;
  double elapsed_seconds;  /* cumulative wall clock, 0 when timing is off */
} coldstart_step;

typedef struct coldstart_episode_params {
  const char* learner;   /* uniform | perceptron | knn | softmax_head | mlp */
  const char* strategy;  /* random | confidence | least_confidence | margin | entropy */
  const char* track;     /* SO | SB | PO | PB */
  int32_t batch_size;    /* batch tracks only; must be >= 2 there */
  int32_t reset_each_batch; /* batch tracks: 1 = retrain from scratch each boundary */
  uint64_t seed;
  int64_t max_steps;     /* 0 = run the full pool */
  int32_t timing;        /* 1 = record wall clock, 0 = zeros */
} coldstart_episode_params;

COLDSTART_API const char* coldstart_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
COLDSTART_API const char* coldstart_last_error(void);

COLDSTART_API void coldstart_string_free(char* s);

/* ---- pools ---- */

COLDSTART_API coldstart_status coldstart_pool_load_mnist(
    const char* images_path, const char* labels_path, coldstart_pool** out);

COLDSTART_API coldstart_status coldstart_pool_load_embeddings(
    const char* path, coldstart_pool** out);

COLDSTART_API coldstart_status coldstart_pool_load_agnews(
    const char* path, uint32_t hash_dim, coldstart_pool** out);

COLDSTART_API coldstart_status coldstart_pool_make_blobs(
    int64_t n, int32_t classes, int32_t dim, double spread, uint64_t seed,
    coldstart_pool** out);

COLDSTART_API coldstart_status coldstart_pool_save_embeddings(
    const coldstart_pool* pool, const char* path);

COLDSTART_API int64_t coldstart_pool_size(const coldstart_pool* pool);
COLDSTART_API int32_t coldstart_pool_classes(const coldstart_pool* pool);
COLDSTART_API int32_t coldstart_pool_dim(const coldstart_pool* pool);
COLDSTART_API void coldstart_pool_free(coldstart_pool* pool);

/* ---- episodes ---- */

COLDSTART_API coldstart_status coldstart_run_episode(
    const coldstart_pool* pool, const coldstart_episode_params* params,
    coldstart_trajectory** out);

COLDSTART_API int64_t coldstart_trajectory_length(
    const coldstart_trajectory* trajectory);

COLDSTART_API coldstart_status coldstart_trajectory_step(
    const coldstart_trajectory* trajectory, int64_t index,
    coldstart_step* out);

COLDSTART_API int64_t coldstart_trajectory_final_error(
    const coldstart_trajectory* trajectory);

COLDSTART_API coldstart_status coldstart_trajectory_write_csv(
    const coldstart_trajectory* trajectory, const char* path);

COLDSTART_API void coldstart_trajectory_free(coldstart_trajectory* trajectory);

/* ---- analytic references ---- */

/* Expected cumulative errors of uniform guessing: n * (1 - 1/classes). */
COLDSTART_API double coldstart_random_baseline(int64_t n, int32_t classes);

/* Perceptron mistake bound (radius/margin)^2 for separable binary data. */
COLDSTART_API coldstart_status coldstart_perceptron_bound(
    double radius, double margin, double* out);

/* Oracle-floor report as JSON: analytic mapping expectation, Monte Carlo
 * check, composed band, and (when pool is non-NULL) the cluster-first oracle
 * run on that pool. boundary/noise are the residual error ranges. */
COLDSTART_API coldstart_status coldstart_oracle_json(
    int32_t classes, int32_t boundary_low, int32_t boundary_high,
    int32_t noise_low, int32_t noise_high, uint64_t trials, uint64_t seed,
    const coldstart_pool* pool, char** out_json);

/* ---- config-driven runs ---- */

/* Executes the config at config_path. Optional overrides: out_dir and
 * seeds_csv may be NULL, cutoff < 0 keeps the config value. On success
 * *out_run_dir names the directory the artifacts were written to. */
COLDSTART_API coldstart_status coldstart_run_config(
    const char* config_path, const char* out_dir, const char* seeds_csv,
    int32_t cutoff, int32_t parallel, char** out_run_dir);

/* Batch-size sweep over the same config; returns the comparison table. */
COLDSTART_API coldstart_status coldstart_run_ablation(
    const char* config_path, const char* batch_sizes_csv, const char* out_dir,
    int32_t parallel, char** out_table);

/* Writes small self-describing sample datasets under dir. */
COLDSTART_API coldstart_status coldstart_write_fixtures(const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* COLDSTART_COLDSTART_H */

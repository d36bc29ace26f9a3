#ifndef TSCALE_TSCALE_H
#define TSCALE_TSCALE_H

/* C interface to libtscale. Objects are opaque handles released with the
 * matching *_free call. Every fallible call returns a tscale_status; on
 * failure tscale_last_error() describes the problem (per thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TSCALE_API __declspec(dllexport)
#else
#define TSCALE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tscale_status {
  TSCALE_OK = 0,
  TSCALE_ERR_VALIDATION = 1, /* bad configuration or input data */
  TSCALE_ERR_RUNTIME = 2,    /* failure during computation or I/O */
  TSCALE_ERR_ARGUMENT = 3,   /* invalid argument to a library call */
  TSCALE_ERR_UNDEFINED = 4   /* metric undefined for the given input */
} tscale_status;

typedef struct tscale_sequence tscale_sequence;
typedef struct tscale_windowing tscale_windowing;

TSCALE_API const char* tscale_version(void);
TSCALE_API const char* tscale_last_error(void);
/* Human summary left by the last successful command call. */
TSCALE_API const char* tscale_last_output(void);
/* Process exit code for a status: 0 ok, 1 validation, 2 runtime. */
TSCALE_API int tscale_exit_code(tscale_status status);

/* ---- graph sequences ---- */

/* delimiter: ',' '\t' or ' ' (runs of blanks). origin is used only when has_origin is nonzero. */
TSCALE_API tscale_status tscale_sequence_load_edges(const char* path, int64_t resolution, char delimiter,
                                                    int has_origin, int64_t origin, tscale_sequence** out);
TSCALE_API tscale_status tscale_sequence_load_archive(const char* dir, tscale_sequence** out);
TSCALE_API tscale_status tscale_sequence_save_archive(const tscale_sequence* seq, const char* dir);
TSCALE_API size_t tscale_sequence_length(const tscale_sequence* seq);
TSCALE_API size_t tscale_sequence_vertex_count(const tscale_sequence* seq);
/* Edge count of the graph at a 1-based step. */
TSCALE_API tscale_status tscale_sequence_edge_count(const tscale_sequence* seq, size_t step, size_t* out);
TSCALE_API void tscale_sequence_free(tscale_sequence* seq);

/* ---- windowings ---- */

TSCALE_API tscale_status tscale_windowing_uniform(size_t length, size_t width, tscale_windowing** out);
TSCALE_API tscale_status tscale_windowing_random(size_t length, uint64_t seed, tscale_windowing** out);
TSCALE_API size_t tscale_windowing_length(const tscale_windowing* w);
TSCALE_API size_t tscale_windowing_segment_count(const tscale_windowing* w);
/* 1-based inclusive span of window `index` (0-based). */
TSCALE_API tscale_status tscale_windowing_segment(const tscale_windowing* w, size_t index, size_t* first,
                                                  size_t* last);
TSCALE_API void tscale_windowing_free(tscale_windowing* w);

/* ---- selectors ---- */

TSCALE_API tscale_status tscale_select_fourier(const tscale_sequence* seq, size_t* width);
TSCALE_API tscale_status tscale_select_jaccard(const tscale_sequence* seq, double tau, size_t* width);
TSCALE_API tscale_status tscale_select_adage(const tscale_sequence* seq, double epsilon, size_t consecutive,
                                             size_t* width);
TSCALE_API tscale_status tscale_select_entropy(const tscale_sequence* seq, tscale_windowing** out);

/* ---- tasks and metrics ---- */

/* Change points (1-based steps) of `seq` under `windowing`. Writes at most
 * `capacity` times; *count receives the total number detected. */
TSCALE_API tscale_status tscale_graphscope_detect(const tscale_sequence* seq, const tscale_windowing* windowing,
                                                  size_t* times, size_t capacity, size_t* count);
/* AP of Katz scores on the union of steps first..last against the new links
 * of step `next`. *skipped is set when `next` brings no new link. */
TSCALE_API tscale_status tscale_link_step_score(const tscale_sequence* seq, size_t first, size_t last, size_t next,
                                                double beta, double* score, int* skipped);
TSCALE_API tscale_status tscale_cp_pr_auc(const size_t* proposed, size_t k, const size_t* truth, size_t l, size_t n,
                                          double* out);
TSCALE_API tscale_status tscale_roc_auc(const double* scores, const uint8_t* positive, size_t count, double* out);
/* relevance[i] != 0 marks the item at rank i + 1 as a positive. */
TSCALE_API tscale_status tscale_average_precision(const uint8_t* relevance, size_t count, size_t total_positives,
                                                  double* out);

/* ---- commands ---- */

/* overrides: optional JSON merge patch applied to the configuration before
 * validation (NULL for none). task may be NULL for the configured task. */
TSCALE_API tscale_status tscale_cmd_ingest(const char* const* paths, size_t count, int64_t resolution, char delimiter,
                                           int has_origin, int64_t origin, const char* out_dir);
TSCALE_API tscale_status tscale_cmd_sweep(const char* config_path, const char* task, const char* overrides);
TSCALE_API tscale_status tscale_cmd_select(const char* config_path, const char* overrides);
TSCALE_API tscale_status tscale_cmd_evaluate(const char* config_path, const char* overrides);
TSCALE_API tscale_status tscale_cmd_analyze(const char* const* curve_paths, size_t count, const char* out_dir);
/* out_csv may be NULL to only produce the summary text. */
TSCALE_API tscale_status tscale_cmd_report(const char* const* report_paths, size_t count, const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif

#ifndef MONOWRAP_MONOWRAP_H
#define MONOWRAP_MONOWRAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(MONOWRAP_BUILDING)
#define MW_API __attribute__((visibility("default")))
#else
#define MW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mw_status {
  MW_OK = 0,
  MW_INVALID_ARGUMENT = 1,
  MW_DOMAIN_MISMATCH = 2,
  MW_EMPTY_SAMPLE = 3,
  MW_INVALID_ARITY = 4,
  MW_INVALID_CONFIG = 5,
  MW_BUDGET_EXCEEDED = 6,
  MW_LEARNER_FAILURE = 7,
  MW_INTERNAL_ERROR = 8
} mw_status;

/* Message of the last failing call on this thread; "" after a success. */
MW_API const char* mw_last_error(void);
MW_API const char* mw_status_name(mw_status status);

/* Strings returned through char** out-parameters are released with this. */
MW_API void mw_string_free(char* s);

typedef struct mw_distribution mw_distribution;
typedef struct mw_learner mw_learner;
typedef struct mw_sample mw_sample;
typedef struct mw_hypothesis mw_hypothesis;

/* {"k": 2, "support": [{"point": "x0", "label": 0, "p": 0.5}, ...]} */
MW_API mw_status mw_distribution_from_json(const char* json, mw_distribution** out);
MW_API int mw_distribution_num_labels(const mw_distribution* dist);
MW_API void mw_distribution_free(mw_distribution* dist);

/* Learner spec JSON, e.g. {"kind": "sabotaged", "inner": {"kind": "finite_erm",
   "all_tables": true}}. dist may be NULL for learners that do not need the
   point names of a finite domain. */
MW_API mw_status mw_learner_from_json(const char* spec, int num_labels,
                                      const mw_distribution* dist, mw_learner** out);
MW_API void mw_learner_free(mw_learner* learner);

/* n i.i.d. draws from dist using the stream derived from seed. */
MW_API mw_status mw_sample_draw(const mw_distribution* dist, size_t n, uint64_t seed,
                                mw_sample** out);
MW_API size_t mw_sample_size(const mw_sample* sample);
MW_API void mw_sample_free(mw_sample* sample);

MW_API mw_status mw_learner_train(const mw_learner* learner, const mw_sample* sample,
                                  mw_hypothesis** out);

/* Runs the monotonizing wrapper around learner with the standard parameters.
   The regularizer's coins come from coin_seed. If trace_jsonl is not NULL it
   receives one JSON object per update stage. */
MW_API mw_status mw_monotonize(const mw_learner* learner, const mw_sample* sample,
                               uint64_t coin_seed, mw_hypothesis** out, char** trace_jsonl);

MW_API mw_status mw_population_loss(const mw_hypothesis* h, const mw_distribution* dist,
                                    double* out);
/* Human-readable description of the hypothesis. */
MW_API mw_status mw_hypothesis_describe(const mw_hypothesis* h, char** out);
MW_API void mw_hypothesis_free(mw_hypothesis* h);

/* Exact expected population loss over samples of size m, by enumeration:
   of the learner itself when wrapped == 0, of the wrapper otherwise. */
MW_API mw_status mw_expected_loss(const mw_learner* learner, const mw_distribution* dist,
                                  uint64_t m, int wrapped, double* out);

/* LG_n and LR_n of a cell distribution p[0..k-1]. */
MW_API mw_status mw_exact_lg(const double* p, int k, size_t n, double* out);
MW_API mw_status mw_exact_lr(const double* p, int k, size_t n, double* out);

/* Block schedule of a sample of size m >= 9. sizes receives b(0), ...,
   b(T-1), b(T-1) (T + 1 entries) when capacity allows; *count is always set
   to T + 1. */
MW_API mw_status mw_block_schedule(uint64_t m, unsigned* stages, uint64_t* discarded,
                                   uint64_t* sizes, size_t capacity, size_t* count);

typedef struct mw_run_options {
  int has_seed;   /* nonzero: seed overrides the config's seed */
  uint64_t seed;
  unsigned jobs;  /* 0 is treated as 1 */
  int json;       /* nonzero: JSON output, otherwise CSV */
} mw_run_options;

/* Config-driven runs. config_dir resolves relative paths inside the config
   (may be NULL for the current directory). *passed is set to 1 when every
   non-vacuous check holds; curve runs always pass. */
MW_API mw_status mw_run_config(const char* config_json, const char* config_dir,
                               const char* expected_kind, const mw_run_options* options,
                               char** output, int* passed);

/* Schedule audit over [begin, end] without a config. */
MW_API mw_status mw_schedule_audit(uint64_t begin, uint64_t end, int json, char** output,
                                   int* passed);

#ifdef __cplusplus
}
#endif

#endif

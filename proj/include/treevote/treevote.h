#ifndef TREEVOTE_H
#define TREEVOTE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define TV_API __declspec(dllexport)
#else
#  define TV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tv_status {
  TV_OK = 0,
  TV_ERR_CONFIG = 1,
  TV_ERR_DATA = 2,
  TV_ERR_DEGENERATE = 3,
  TV_ERR_OUTPUT = 4,
  TV_ERR_INVALID_ARGUMENT = 5,
  TV_ERR_INTERNAL = 6
} tv_status;

typedef struct tv_dataset tv_dataset;
typedef struct tv_model tv_model;

TV_API const char* tv_version(void);

/* Message for the last failing call on this thread; "" if none. */
TV_API const char* tv_last_error(void);

/* Strings returned through char** out-params are owned by the caller. */
TV_API void tv_string_free(char* s);

/* Synthetic worker-evaluation data. */
TV_API tv_status tv_dataset_generate(uint64_t seed, size_t rows, tv_dataset** out);
TV_API tv_status tv_dataset_load(const char* csv_path, const char* schema_path, tv_dataset** out);
TV_API tv_status tv_dataset_from_csv_text(const char* csv_text, const char* schema_json, tv_dataset** out);
TV_API tv_status tv_dataset_save(const tv_dataset* data, const char* csv_path, const char* schema_path);
TV_API size_t tv_dataset_rows(const tv_dataset* data);
TV_API size_t tv_dataset_class_count(const tv_dataset* data);
/* NULL when index is out of range. Valid while data lives. */
TV_API const char* tv_dataset_class_name(const tv_dataset* data, size_t index);
/* Chi-square screening. *out keeps only retained features; report_json may be NULL. */
TV_API tv_status tv_dataset_select_features(const tv_dataset* data, double alpha, tv_dataset** out,
                                            char** report_json);
TV_API void tv_dataset_free(tv_dataset* data);

/* learner_json: {"kind": "...", "params": {...}}. */
TV_API tv_status tv_model_train(const tv_dataset* data, const char* learner_json, uint64_t seed, tv_model** out);
TV_API tv_status tv_model_committee(const tv_model* const* members, size_t count, tv_model** out);
TV_API tv_status tv_model_load(const char* path, tv_model** out);
TV_API tv_status tv_model_save(const tv_model* model, const char* path);
/* One class index per row of data, written to labels[0..rows). */
TV_API tv_status tv_model_predict(const tv_model* model, const tv_dataset* data, size_t* labels, size_t capacity);
/* Row-major rows x classes matrix. */
TV_API tv_status tv_model_predict_proba(const tv_model* model, const tv_dataset* data, double* probs, size_t capacity);
/* Summary JSON with accuracy, error rate, standard error, AUCs and confusion. */
TV_API tv_status tv_model_evaluate(const tv_model* model, const tv_dataset* data, char** summary_json);
TV_API void tv_model_free(tv_model* model);

/* points_csv: two-column CSV with header. kind: "roc" or "gain". */
TV_API tv_status tv_render_svg(const char* points_csv, const char* kind, int baseline, char** svg);

/* Runs a CLI subcommand. out_dir and seed may be NULL. */
TV_API tv_status tv_run_command(const char* command, const char* config_path, const char* out_dir,
                                const uint64_t* seed, char** console);

#ifdef __cplusplus
}
#endif

#endif

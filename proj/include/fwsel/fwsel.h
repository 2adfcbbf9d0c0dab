#ifndef FWSEL_FWSEL_H
#define FWSEL_FWSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(FWSEL_BUILDING_LIBRARY)
#define FWSEL_API __attribute__((visibility("default")))
#else
#define FWSEL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as the CLI exit status. */
typedef enum fwsel_status {
  FWSEL_OK = 0,
  FWSEL_ERR_CONFIG = 1,
  FWSEL_ERR_DATA = 2,
  FWSEL_ERR_INTERNAL = 3,
  FWSEL_ERR_ARGUMENT = 4 /* null handle or bad argument to the API itself */
} fwsel_status;

typedef struct fwsel_config fwsel_config;
typedef struct fwsel_dataset fwsel_dataset;
typedef struct fwsel_report fwsel_report;

typedef struct fwsel_metrics {
  double auc, acc, pre, sen, f1, spe, avg;
} fwsel_metrics;

FWSEL_API const char* fwsel_version(void);

/* Message of the last failing call on this thread; "" if none. */
FWSEL_API const char* fwsel_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
FWSEL_API void fwsel_string_free(char* s);

FWSEL_API fwsel_status fwsel_config_default(fwsel_config** out);
FWSEL_API fwsel_status fwsel_config_load(const char* path, fwsel_config** out);
FWSEL_API fwsel_status fwsel_config_parse(const char* text, fwsel_config** out);
FWSEL_API fwsel_status fwsel_config_set(fwsel_config* cfg, const char* key, const char* value);
FWSEL_API fwsel_status fwsel_config_validate(const fwsel_config* cfg);
FWSEL_API fwsel_status fwsel_config_serialize(const fwsel_config* cfg, char** out);
/* Tab-separated "key\ttype\tdescription" lines. */
FWSEL_API fwsel_status fwsel_config_keys(char** out);
FWSEL_API void fwsel_config_free(fwsel_config* cfg);

FWSEL_API fwsel_status fwsel_dataset_load(const char* path, fwsel_dataset** out);
FWSEL_API fwsel_status fwsel_dataset_synthetic(const fwsel_config* cfg, uint64_t seed, fwsel_dataset** out);
FWSEL_API fwsel_status fwsel_dataset_save(const fwsel_dataset* ds, const char* path);
FWSEL_API size_t fwsel_dataset_rows(const fwsel_dataset* ds);
FWSEL_API size_t fwsel_dataset_dims(const fwsel_dataset* ds);
FWSEL_API void fwsel_dataset_free(fwsel_dataset* ds);

/* n labels (0/1), hard predictions and real-valued scores. */
FWSEL_API fwsel_status fwsel_metrics_evaluate(const int* labels, const int* predictions, const double* scores,
                                              size_t n, fwsel_metrics* out);

/* command/sub as for the command line; out_dir may be NULL. */
FWSEL_API fwsel_status fwsel_run(const fwsel_config* cfg, const char* command, const char* sub, const char* out_dir,
                                 unsigned threads, fwsel_report** out);
FWSEL_API const char* fwsel_report_json(const fwsel_report* rep);
FWSEL_API const char* fwsel_report_text(const fwsel_report* rep);
FWSEL_API void fwsel_report_free(fwsel_report* rep);

/* Comparison table over n report JSON documents. */
FWSEL_API fwsel_status fwsel_compare(const char* const* report_json, size_t n, size_t reference, char** out);

FWSEL_API fwsel_status fwsel_write_file_atomic(const char* path, const char* data, size_t size);

#ifdef __cplusplus
}
#endif

#endif

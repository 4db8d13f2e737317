/* C interface to the qqlax verification library. */
#ifndef QQLAX_H
#define QQLAX_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QQLAX_API __declspec(dllexport)
#else
#define QQLAX_API __attribute__((visibility("default")))
#endif

typedef enum {
    QQLAX_OK = 0,
    QQLAX_CHECK_FAILED = 1,
    QQLAX_CONFIG_ERROR = 2,
    QQLAX_INTERNAL_ERROR = 3,
    QQLAX_IO_ERROR = 4
} qqlax_status;

typedef enum { QQLAX_FORMAT_JSON = 0, QQLAX_FORMAT_TEXT = 1 } qqlax_format;

typedef struct qqlax_config qqlax_config;
typedef struct qqlax_report qqlax_report;

QQLAX_API const char* qqlax_version(void);
/* Message of the last failing call on this thread; empty when none. */
QQLAX_API const char* qqlax_last_error(void);

QQLAX_API qqlax_status qqlax_config_default(qqlax_config** out);
QQLAX_API qqlax_status qqlax_config_from_json(const char* json_text, qqlax_config** out);
QQLAX_API qqlax_status qqlax_config_from_file(const char* path, qqlax_config** out);
QQLAX_API qqlax_status qqlax_config_set_suite(qqlax_config* cfg, const char* suite);
QQLAX_API qqlax_status qqlax_config_set_seed(qqlax_config* cfg, uint64_t seed);
QQLAX_API qqlax_status qqlax_config_set_degree(qqlax_config* cfg, int degree);
QQLAX_API void qqlax_config_free(qqlax_config* cfg);

/* Validates the config and runs its suite. A report is produced whenever validation succeeds;
   QQLAX_CHECK_FAILED then signals that at least one check failed. */
QQLAX_API qqlax_status qqlax_run(const qqlax_config* cfg, qqlax_report** out);
QQLAX_API int qqlax_report_passed(const qqlax_report* rep);
QQLAX_API int qqlax_report_check_count(const qqlax_report* rep);
QQLAX_API double qqlax_report_wall_time(const qqlax_report* rep);
/* Serialized report, owned by the caller (release with qqlax_string_free). */
QQLAX_API qqlax_status qqlax_report_emit(const qqlax_report* rep, qqlax_format format, int with_timing, char** out);
QQLAX_API void qqlax_report_free(qqlax_report* rep);
QQLAX_API void qqlax_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif

#ifndef LIBRATE_H
#define LIBRATE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define LIBRATE_API __attribute__((visibility("default")))
#else
#define LIBRATE_API
#endif

typedef enum {
    LIBRATE_OK = 0,
    LIBRATE_NOT_VERIFIED = 1, /* ran to completion, some certificate failed */
    LIBRATE_E_ARGUMENT = 2,
    LIBRATE_E_CONFIG = 3,
    LIBRATE_E_IO = 4,
    LIBRATE_E_MISSING_CERTIFICATE = 5,
    LIBRATE_E_INTERNAL = 6
} librate_status;

typedef struct librate_config librate_config;
typedef struct librate_result librate_result;

LIBRATE_API const char* librate_version(void);
/* Message of the last failing call on this thread; never NULL. */
LIBRATE_API const char* librate_last_error(void);

/* path == NULL gives the built-in defaults. */
LIBRATE_API librate_status librate_config_load(const char* path, librate_config** out);
LIBRATE_API void librate_config_free(librate_config* cfg);
LIBRATE_API librate_status librate_config_set_long_run(librate_config* cfg, int long_run);
LIBRATE_API librate_status librate_config_set_threads(librate_config* cfg, unsigned threads);
LIBRATE_API librate_status librate_config_set_output_dir(librate_config* cfg, const char* dir);
/* Comma separated stage list; dependencies are added automatically. */
LIBRATE_API librate_status librate_config_set_pipeline(librate_config* cfg, const char* stages);

/* stage: family, hyperbolicity, chart, fibers or transversal; runs it with its dependencies. */
LIBRATE_API librate_status librate_prove(const librate_config* cfg, const char* stage, librate_result** out);
LIBRATE_API librate_status librate_run(const librate_config* cfg, librate_result** out);
LIBRATE_API void librate_result_free(librate_result* res);

LIBRATE_API int librate_result_verified(const librate_result* res);
LIBRATE_API size_t librate_result_stage_count(const librate_result* res);
/* Fills name, verified flag, certificate count and seconds of stage i. */
LIBRATE_API librate_status librate_result_stage(const librate_result* res, size_t i, const char** name, int* verified,
                                                size_t* certificates, double* seconds, const char** detail);
/* JSON summary of the headline enclosures; owned by res. */
LIBRATE_API const char* librate_result_summary(const librate_result* res);

/* Writes <out_dir>/<what>.csv; what: hill, family, slopes, fibers, section. */
LIBRATE_API librate_status librate_plot(const librate_config* cfg, const char* what, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif

/* C interface to the adaptive Hellinger-Reissner eigenvalue solver.
 *
 * All objects are opaque handles released with the matching *_destroy function.
 * Every call returning hreig_status leaves a message in hreig_last_error() on failure;
 * the message is thread-local and valid until the next failing call on the same thread. */
#ifndef HREIG_HREIG_H
#define HREIG_HREIG_H

#include <stddef.h>

#if defined(HREIG_BUILDING_LIBRARY)
#define HREIG_API __attribute__((visibility("default")))
#else
#define HREIG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hreig_status {
    HREIG_OK = 0,
    HREIG_ERR_INVALID_ARGUMENT = 1,
    HREIG_ERR_CONFIG = 2,
    HREIG_ERR_PARSE = 3,
    HREIG_ERR_MESH = 4,
    HREIG_ERR_SOLVER = 5,
    HREIG_ERR_NUMERIC = 6,
    HREIG_ERR_IO = 7,
    HREIG_ERR_INTERNAL = 8
} hreig_status;

typedef struct hreig_mesh hreig_mesh;
typedef struct hreig_config hreig_config;
typedef struct hreig_history hreig_history;

/* One row of the convergence history. The has_* flags are 0 when postprocessing was off. */
typedef struct hreig_level_record {
    int level;
    int ntri;
    int dim_sigma;
    int dim_v;
    double lambda;
    int has_lambda_star;
    double lambda_star;
    double eta;
    int has_eta_star;
    double eta_star;
    int nmarked;
    double seconds;
} hreig_level_record;

HREIG_API const char* hreig_version(void);
HREIG_API const char* hreig_last_error(void);
/* Pipeline stage (setup, assemble, solve, estimate, postprocess, mark, observe, refine) of the last
 * failing run on this thread, or "" when the failure happened outside a run. */
HREIG_API const char* hreig_last_stage(void);

HREIG_API hreig_status hreig_mesh_lshape(hreig_mesh** out);
HREIG_API hreig_status hreig_mesh_load(const char* path, hreig_mesh** out);
HREIG_API hreig_status hreig_mesh_save(const hreig_mesh* mesh, const char* path);
/* Newest vertex bisection of the marked triangles plus closure. */
HREIG_API hreig_status hreig_mesh_bisect(const hreig_mesh* mesh, const int* marked, size_t count, hreig_mesh** out);
HREIG_API hreig_status hreig_mesh_bisect_all(const hreig_mesh* mesh, hreig_mesh** out);
HREIG_API hreig_status hreig_mesh_info(const hreig_mesh* mesh, int* vertices, int* triangles, int* edges);
HREIG_API void hreig_mesh_destroy(hreig_mesh* mesh);

/* Configuration holding defaults; keys match the config file format. */
HREIG_API hreig_status hreig_config_create(hreig_config** out);
HREIG_API hreig_status hreig_config_set(hreig_config* config, const char* key, const char* value);
HREIG_API hreig_status hreig_config_load(hreig_config* config, const char* path);
HREIG_API hreig_status hreig_config_validate(const hreig_config* config);
/* Copies the resolved manifest (key=value lines) into buffer; *needed receives the size
 * including the terminating NUL. buffer may be NULL when capacity is 0. */
HREIG_API hreig_status hreig_config_manifest(const hreig_config* config, char* buffer, size_t capacity,
                                             size_t* needed);
HREIG_API void hreig_config_destroy(hreig_config* config);

/* Runs the configured subcommand and writes its files into the output directory.
 * On a compute failure *out still receives the partial history (may be empty). */
HREIG_API hreig_status hreig_execute(const hreig_config* config, hreig_history** out);
/* In-memory runs from an explicit mesh; no files are written. Partial history on failure. */
HREIG_API hreig_status hreig_run_adaptive(const hreig_mesh* mesh, const hreig_config* config, hreig_history** out);
HREIG_API hreig_status hreig_run_uniform(const hreig_mesh* mesh, const hreig_config* config, int levels,
                                         hreig_history** out);

HREIG_API size_t hreig_history_count(const hreig_history* history);
HREIG_API hreig_status hreig_history_record(const hreig_history* history, size_t index, hreig_level_record* out);
HREIG_API hreig_status hreig_history_write_csv(const hreig_history* history, const char* path);
HREIG_API void hreig_history_destroy(hreig_history* history);

#ifdef __cplusplus
}
#endif

#endif

#include "hreig/hreig.h"

#include "config.hpp"

#include <cstring>
#include <memory>
#include <new>
#include <string>

struct hreig_mesh {
    hreig::Mesh mesh;
};

struct hreig_config {
    hreig::RunSpec spec;
};

struct hreig_history {
    hreig::ConvergenceHistory history;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_stage;

hreig_status status_of(hreig::ErrorKind kind) {
    using hreig::ErrorKind;
    switch (kind) {
    case ErrorKind::InvalidArgument: return HREIG_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return HREIG_ERR_PARSE;
    case ErrorKind::Mesh: return HREIG_ERR_MESH;
    case ErrorKind::Config: return HREIG_ERR_CONFIG;
    case ErrorKind::Solver: return HREIG_ERR_SOLVER;
    case ErrorKind::Numeric: return HREIG_ERR_NUMERIC;
    case ErrorKind::Io: return HREIG_ERR_IO;
    case ErrorKind::Internal: return HREIG_ERR_INTERNAL;
    }
    return HREIG_ERR_INTERNAL;
}

/// Runs body, translating exceptions into status codes.
template <class F>
hreig_status guarded(F&& body) {
    last_stage.clear();
    try {
        body();
        return HREIG_OK;
    } catch (const hreig::StageError& e) {
        last_error = e.what();
        last_stage = e.stage();
        return status_of(e.kind());
    } catch (const hreig::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return HREIG_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return HREIG_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return HREIG_ERR_INTERNAL;
    }
}

hreig_status null_argument(const char* what) {
    last_error = std::string("null argument: ") + what;
    last_stage.clear();
    return HREIG_ERR_INVALID_ARGUMENT;
}

template <class Run>
hreig_status run_with_history(hreig_history** out, Run&& run) {
    *out = nullptr;
    auto holder = std::make_unique<hreig_history>();
    const hreig_status st = guarded([&] {
        try {
            holder->history = run();
        } catch (const hreig::StageError& e) {
            holder->history = e.partial();
            throw;
        }
    });
    *out = holder.release();
    return st;
}

}  // namespace

extern "C" {

const char* hreig_version(void) { return hreig::artifact_version(); }
const char* hreig_last_error(void) { return last_error.c_str(); }
const char* hreig_last_stage(void) { return last_stage.c_str(); }

hreig_status hreig_mesh_lshape(hreig_mesh** out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = new hreig_mesh{hreig::initial_lshape()}; });
}

hreig_status hreig_mesh_load(const char* path, hreig_mesh** out) {
    if (!path) return null_argument("path");
    if (!out) return null_argument("out");
    return guarded([&] { *out = new hreig_mesh{hreig::load_mesh(path)}; });
}

hreig_status hreig_mesh_save(const hreig_mesh* mesh, const char* path) {
    if (!mesh) return null_argument("mesh");
    if (!path) return null_argument("path");
    return guarded([&] { hreig::save_mesh(mesh->mesh, path); });
}

hreig_status hreig_mesh_bisect(const hreig_mesh* mesh, const int* marked, size_t count, hreig_mesh** out) {
    if (!mesh) return null_argument("mesh");
    if (!marked && count > 0) return null_argument("marked");
    if (!out) return null_argument("out");
    return guarded([&] {
        *out = new hreig_mesh{hreig::bisect(mesh->mesh, std::span<const int>(marked, count))};
    });
}

hreig_status hreig_mesh_bisect_all(const hreig_mesh* mesh, hreig_mesh** out) {
    if (!mesh) return null_argument("mesh");
    if (!out) return null_argument("out");
    return guarded([&] { *out = new hreig_mesh{hreig::bisect_all(mesh->mesh)}; });
}

hreig_status hreig_mesh_info(const hreig_mesh* mesh, int* vertices, int* triangles, int* edges) {
    if (!mesh) return null_argument("mesh");
    if (vertices) *vertices = mesh->mesh.num_vertices();
    if (triangles) *triangles = mesh->mesh.num_triangles();
    if (edges) *edges = mesh->mesh.num_edges();
    return HREIG_OK;
}

void hreig_mesh_destroy(hreig_mesh* mesh) { delete mesh; }

hreig_status hreig_config_create(hreig_config** out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = new hreig_config{}; });
}

hreig_status hreig_config_set(hreig_config* config, const char* key, const char* value) {
    if (!config) return null_argument("config");
    if (!key) return null_argument("key");
    if (!value) return null_argument("value");
    return guarded([&] { hreig::set_option(config->spec, key, value); });
}

hreig_status hreig_config_load(hreig_config* config, const char* path) {
    if (!config) return null_argument("config");
    if (!path) return null_argument("path");
    return guarded([&] { hreig::load_config(config->spec, path); });
}

hreig_status hreig_config_validate(const hreig_config* config) {
    if (!config) return null_argument("config");
    return guarded([&] { hreig::validate(config->spec); });
}

hreig_status hreig_config_manifest(const hreig_config* config, char* buffer, size_t capacity, size_t* needed) {
    if (!config) return null_argument("config");
    if (!buffer && capacity > 0) return null_argument("buffer");
    return guarded([&] {
        const std::string text = hreig::manifest(config->spec);
        if (needed) *needed = text.size() + 1;
        if (capacity == 0) return;
        if (capacity < text.size() + 1) hreig::fail(hreig::ErrorKind::InvalidArgument, "manifest buffer too small");
        std::memcpy(buffer, text.c_str(), text.size() + 1);
    });
}

void hreig_config_destroy(hreig_config* config) { delete config; }

hreig_status hreig_execute(const hreig_config* config, hreig_history** out) {
    if (!config) return null_argument("config");
    if (!out) return null_argument("out");
    return run_with_history(out, [&] { return hreig::execute(config->spec); });
}

hreig_status hreig_run_adaptive(const hreig_mesh* mesh, const hreig_config* config, hreig_history** out) {
    if (!mesh) return null_argument("mesh");
    if (!config) return null_argument("config");
    if (!out) return null_argument("out");
    return run_with_history(out, [&] {
        hreig::validate(config->spec);
        return hreig::afem_run(mesh->mesh, hreig::adapt_config(config->spec));
    });
}

hreig_status hreig_run_uniform(const hreig_mesh* mesh, const hreig_config* config, int levels, hreig_history** out) {
    if (!mesh) return null_argument("mesh");
    if (!config) return null_argument("config");
    if (!out) return null_argument("out");
    return run_with_history(out, [&] {
        hreig::validate(config->spec);
        return hreig::uniform_run(mesh->mesh, hreig::adapt_config(config->spec), levels);
    });
}

size_t hreig_history_count(const hreig_history* history) { return history ? history->history.levels.size() : 0; }

hreig_status hreig_history_record(const hreig_history* history, size_t index, hreig_level_record* out) {
    if (!history) return null_argument("history");
    if (!out) return null_argument("out");
    if (index >= history->history.levels.size()) {
        last_error = "history index out of range";
        return HREIG_ERR_INVALID_ARGUMENT;
    }
    const hreig::LevelRecord& r = history->history.levels[index];
    *out = hreig_level_record{r.level,
                              r.ntri,
                              r.dim_sigma,
                              r.dim_v,
                              r.lambda,
                              r.lambda_star ? 1 : 0,
                              r.lambda_star.value_or(0.0),
                              r.eta,
                              r.eta_star ? 1 : 0,
                              r.eta_star.value_or(0.0),
                              r.nmarked,
                              r.seconds};
    return HREIG_OK;
}

hreig_status hreig_history_write_csv(const hreig_history* history, const char* path) {
    if (!history) return null_argument("history");
    if (!path) return null_argument("path");
    return guarded([&] { history->history.save_csv(path); });
}

void hreig_history_destroy(hreig_history* history) { delete history; }

}  // extern "C"

#pragma once

#include "adapt.hpp"

#include <string>
#include <vector>

namespace hreig {

/// Resolved run description: subcommand, mesh source, solver settings and outputs.
/// Settings are addressed by flat keys (see config_keys()).
struct RunSpec {
    std::string subcommand = "run";  // run | uniform | dump-mesh | dump-estimator
    std::string preset = "lshape";
    std::string mesh_path;           // overrides preset when set
    std::string model = "stokes";    // stokes | elasticity
    double nu = 1.0;
    double mu = 1.0;
    double lame = 1.0;
    AdaptConfig adapt;               // adapt.model is rebuilt from model/nu/mu/lame
    int levels = 3;                  // uniform levels (uniform, dump-mesh, dump-estimator)
    std::string out = ".";
    bool save_meshes = false;
    bool dump_estimator = false;
    bool dump_matrices = false;
};

const std::vector<std::string>& config_keys();

/// Throws Error(Config) for unknown keys or malformed values.
void set_option(RunSpec& spec, const std::string& key, const std::string& value);

/// Flat "key = value" file; '#' starts a comment.
void load_config(RunSpec& spec, const std::string& path);

/// Checks ranges and cross-field constraints; throws Error(Config).
void validate(const RunSpec& spec);

/// Adapt settings with the compliance model built from the spec.
AdaptConfig adapt_config(const RunSpec& spec);

/// All keys with their resolved values plus artifact_version; replayable through load_config.
std::string manifest(const RunSpec& spec);
std::string option_value(const RunSpec& spec, const std::string& key);

Mesh source_mesh(const RunSpec& spec);

/// Runs the subcommand and writes its outputs (manifest.txt, history.csv, optional dumps) under spec.out.
/// On compute failure the partial history is still written and the StageError is rethrown.
ConvergenceHistory execute(const RunSpec& spec);

const char* artifact_version();

}  // namespace hreig

#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef HREIG_VERSION
#define HREIG_VERSION "0.0.0"
#endif

namespace hreig {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    fail(ErrorKind::Config, "invalid value '" + value + "' for " + key + ": expected " + expected);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) bad_value(key, value, "a number");
    return out;
}

long parse_long(const std::string& key, const std::string& value) {
    // accept integral values written in floating notation, e.g. 5e4
    const double d = parse_double(key, value);
    if (d != static_cast<double>(static_cast<long>(d))) bad_value(key, value, "an integer");
    return static_cast<long>(d);
}

int parse_int(const std::string& key, const std::string& value) {
    const long v = parse_long(key, value);
    if (v < -2147483647L || v > 2147483647L) bad_value(key, value, "an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    bad_value(key, value, "true or false");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(bool v) { return v ? "true" : "false"; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string level_name(const std::string& stem, int level, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%03d", level);
    return stem + buf + ext;
}

}  // namespace

const char* artifact_version() { return HREIG_VERSION; }

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "subcommand", "preset",    "mesh",           "model",       "nu",          "mu",
        "lame",       "theta",     "k",              "target",      "max_dof",     "eta_tol",
        "max_levels", "postprocess", "m",            "mark_estimator", "shift",    "tol",
        "max_iters",  "nev",       "seed",           "threads",     "timing",      "levels",
        "out",        "save_meshes", "dump_estimator", "dump_matrices",
    };
    return keys;
}

void set_option(RunSpec& s, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    AdaptConfig& a = s.adapt;
    if (key == "subcommand") {
        if (v != "run" && v != "uniform" && v != "dump-mesh" && v != "dump-estimator")
            bad_value(key, v, "run, uniform, dump-mesh or dump-estimator");
        s.subcommand = v;
    } else if (key == "preset") {
        s.preset = v;
    } else if (key == "mesh") {
        s.mesh_path = v;
    } else if (key == "model") {
        if (v != "stokes" && v != "elasticity") bad_value(key, v, "stokes or elasticity");
        s.model = v;
    } else if (key == "nu") {
        s.nu = parse_double(key, v);
    } else if (key == "mu") {
        s.mu = parse_double(key, v);
    } else if (key == "lame") {
        s.lame = parse_double(key, v);
    } else if (key == "theta") {
        a.theta = parse_double(key, v);
    } else if (key == "k") {
        a.k = parse_int(key, v);
    } else if (key == "target") {
        a.target = parse_int(key, v);
    } else if (key == "max_dof") {
        a.max_dof = parse_long(key, v);
    } else if (key == "eta_tol") {
        if (v.empty()) a.eta_tol.reset();
        else a.eta_tol = parse_double(key, v);
    } else if (key == "max_levels") {
        a.max_levels = parse_int(key, v);
    } else if (key == "postprocess") {
        a.postprocess = parse_bool(key, v);
    } else if (key == "m") {
        a.post_degree = parse_int(key, v);
    } else if (key == "mark_estimator") {
        if (v == "eta") a.mark = MarkEstimator::Eta;
        else if (v == "eta_star") a.mark = MarkEstimator::EtaStar;
        else bad_value(key, v, "eta or eta_star");
    } else if (key == "shift") {
        if (v.empty()) a.solver.shift.reset();
        else a.solver.shift = parse_double(key, v);
    } else if (key == "tol") {
        a.solver.tol = parse_double(key, v);
    } else if (key == "max_iters") {
        a.solver.max_iters = parse_int(key, v);
    } else if (key == "nev") {
        a.solver.nev = parse_int(key, v);
    } else if (key == "seed") {
        const long seed = parse_long(key, v);
        if (seed < 0) bad_value(key, v, "a non-negative integer");
        a.solver.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "threads") {
        a.threads = parse_int(key, v);
    } else if (key == "timing") {
        a.timing = parse_bool(key, v);
    } else if (key == "levels") {
        s.levels = parse_int(key, v);
    } else if (key == "out") {
        s.out = v;
    } else if (key == "save_meshes") {
        s.save_meshes = parse_bool(key, v);
    } else if (key == "dump_estimator") {
        s.dump_estimator = parse_bool(key, v);
    } else if (key == "dump_matrices") {
        s.dump_matrices = parse_bool(key, v);
    } else {
        fail(ErrorKind::Config, "unknown configuration key '" + key + "'");
    }
}

std::string option_value(const RunSpec& s, const std::string& key) {
    const AdaptConfig& a = s.adapt;
    if (key == "subcommand") return s.subcommand;
    if (key == "preset") return s.preset;
    if (key == "mesh") return s.mesh_path;
    if (key == "model") return s.model;
    if (key == "nu") return fmt(s.nu);
    if (key == "mu") return fmt(s.mu);
    if (key == "lame") return fmt(s.lame);
    if (key == "theta") return fmt(a.theta);
    if (key == "k") return std::to_string(a.k);
    if (key == "target") return std::to_string(a.target);
    if (key == "max_dof") return std::to_string(a.max_dof);
    if (key == "eta_tol") return a.eta_tol ? fmt(*a.eta_tol) : "";
    if (key == "max_levels") return std::to_string(a.max_levels);
    if (key == "postprocess") return fmt(a.postprocess);
    if (key == "m") return std::to_string(a.post_degree < 0 ? a.k + 1 : a.post_degree);
    if (key == "mark_estimator") return a.mark == MarkEstimator::Eta ? "eta" : "eta_star";
    if (key == "shift") return a.solver.shift ? fmt(*a.solver.shift) : "";
    if (key == "tol") return fmt(a.solver.tol);
    if (key == "max_iters") return std::to_string(a.solver.max_iters);
    if (key == "nev") return std::to_string(a.solver.nev);
    if (key == "seed") return std::to_string(a.solver.seed);
    if (key == "threads") return std::to_string(a.threads);
    if (key == "timing") return fmt(a.timing);
    if (key == "levels") return std::to_string(s.levels);
    if (key == "out") return s.out;
    if (key == "save_meshes") return fmt(s.save_meshes);
    if (key == "dump_estimator") return fmt(s.dump_estimator);
    if (key == "dump_matrices") return fmt(s.dump_matrices);
    fail(ErrorKind::Config, "unknown configuration key '" + key + "'");
}

void load_config(RunSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key == "artifact_version") continue;
        try {
            set_option(spec, key, line.substr(eq + 1));
        } catch (const Error& e) {
            fail(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void validate(const RunSpec& s) {
    const AdaptConfig& a = s.adapt;
    if (s.mesh_path.empty() && s.preset != "lshape") fail(ErrorKind::Config, "unknown preset '" + s.preset + "'");
    if (!(a.theta > 0.0 && a.theta < 1.0)) fail(ErrorKind::Config, "theta must lie in (0,1)");
    if (a.k < 3) fail(ErrorKind::Config, "k must be at least 3");
    if (a.target < 1) fail(ErrorKind::Config, "target must be at least 1");
    if (s.model == "stokes" && !(s.nu > 0.0)) fail(ErrorKind::Config, "nu must be positive");
    if (s.model == "elasticity" && !(s.mu > 0.0)) fail(ErrorKind::Config, "mu must be positive");
    if (s.model == "elasticity" && !(s.lame >= 0.0)) fail(ErrorKind::Config, "lame must be non-negative");
    if (a.max_dof <= 0 && !a.eta_tol) fail(ErrorKind::Config, "stopping rule needs max_dof > 0 or eta_tol");
    if (a.eta_tol && !(*a.eta_tol > 0.0)) fail(ErrorKind::Config, "eta_tol must be positive");
    if (a.max_levels < 1) fail(ErrorKind::Config, "max_levels must be positive");
    if (a.post_degree >= 0 && a.post_degree < a.k + 1) fail(ErrorKind::Config, "m must be at least k+1");
    if (a.mark == MarkEstimator::EtaStar && !a.postprocess)
        fail(ErrorKind::Config, "mark_estimator=eta_star requires postprocess");
    if (!(a.solver.tol > 0.0)) fail(ErrorKind::Config, "tol must be positive");
    if (a.solver.max_iters < 1) fail(ErrorKind::Config, "max_iters must be positive");
    if (a.solver.nev < 1) fail(ErrorKind::Config, "nev must be at least 1");
    if (a.threads < 1) fail(ErrorKind::Config, "threads must be positive");
    if (s.levels < 0) fail(ErrorKind::Config, "levels must be non-negative");
    if (s.out.empty()) fail(ErrorKind::Config, "out must not be empty");
}

AdaptConfig adapt_config(const RunSpec& s) {
    AdaptConfig a = s.adapt;
    a.model = s.model == "stokes" ? ComplianceModel::stokes(s.nu) : ComplianceModel::elasticity(s.mu, s.lame);
    return a;
}

std::string manifest(const RunSpec& spec) {
    std::ostringstream out;
    out << "artifact_version=" << artifact_version() << '\n';
    for (const std::string& key : config_keys()) out << key << '=' << option_value(spec, key) << '\n';
    return out.str();
}

Mesh source_mesh(const RunSpec& spec) {
    if (!spec.mesh_path.empty()) return load_mesh(spec.mesh_path);
    if (spec.preset == "lshape") return initial_lshape();
    fail(ErrorKind::Config, "unknown preset '" + spec.preset + "'");
}

ConvergenceHistory execute(const RunSpec& spec) {
    validate(spec);
    namespace fs = std::filesystem;
    const fs::path out(spec.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory " + spec.out + ": " + ec.message());
    {
        std::ofstream m(out / "manifest.txt");
        if (!m) fail(ErrorKind::Io, "cannot write " + (out / "manifest.txt").string());
        m << manifest(spec);
    }

    Mesh mesh = source_mesh(spec);
    const AdaptConfig cfg = adapt_config(spec);

    if (spec.subcommand == "dump-mesh") {
        for (int i = 0; i < spec.levels; ++i) mesh = bisect_all(mesh);
        save_mesh(mesh, (out / "mesh.txt").string());
        return {};
    }

    const bool single = spec.subcommand == "dump-estimator";
    const auto observer = [&](const LevelState& st) {
        if (spec.save_meshes) save_mesh(*st.mesh, (out / level_name("mesh", st.level, ".txt")).string());
        if (spec.dump_estimator || single) {
            const fs::path path = single ? out / "estimator.csv" : out / level_name("estimator", st.level, ".csv");
            std::ofstream e(path);
            if (!e) fail(ErrorKind::Io, "cannot write " + path.string());
            write_estimator_csv(st.estimator, e);
        }
        if (spec.dump_matrices) write_matrix_market(*st.system, (out / level_name("matrices", st.level, "")).string());
    };

    ConvergenceHistory history;
    try {
        if (spec.subcommand == "run") {
            history = afem_run(mesh, cfg, observer);
        } else if (spec.subcommand == "uniform") {
            history = uniform_run(mesh, cfg, spec.levels, observer);
        } else {
            for (int i = 0; i < spec.levels; ++i) mesh = bisect_all(mesh);
            history = uniform_run(mesh, cfg, 0, observer);
        }
    } catch (const StageError& e) {
        e.partial().save_csv((out / "history.csv").string());
        throw;
    }
    history.save_csv((out / "history.csv").string());
    return history;
}

}  // namespace hreig

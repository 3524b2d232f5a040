// Command-line driver for the adaptive Hellinger-Reissner eigenvalue solver.
#include <hreig/hreig.h>

#include "CLI11.hpp"

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(hreig_config* c) const { hreig_config_destroy(c); }
};
struct HistoryDeleter {
    void operator()(hreig_history* h) const { hreig_history_destroy(h); }
};

/// Options mapped one-to-one onto configuration keys; only values given on the command line
/// are forwarded, so they override the config file.
struct Forwarded {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
    bool flag = false;
    bool flag_value = false;
};

struct Command {
    CLI::App* app = nullptr;
    std::string config_file;
    std::vector<std::unique_ptr<Forwarded>> options;
};

void add_value(Command& cmd, const std::string& flag, const std::string& key, const std::string& help) {
    auto f = std::make_unique<Forwarded>();
    f->key = key;
    f->option = cmd.app->add_option(flag, f->value, help);
    cmd.options.push_back(std::move(f));
}

void add_flag(Command& cmd, const std::string& flag, const std::string& key, const std::string& help) {
    auto f = std::make_unique<Forwarded>();
    f->key = key;
    f->flag = true;
    f->option = cmd.app->add_flag(flag, f->flag_value, help);
    cmd.options.push_back(std::move(f));
}

// CLI11 keeps pointers into the command, so it must not move after registration
std::unique_ptr<Command> make_command(CLI::App& root, const std::string& name, const std::string& description) {
    auto owned = std::make_unique<Command>();
    Command& cmd = *owned;
    cmd.app = root.add_subcommand(name, description);
    cmd.app->add_option("--config", cmd.config_file, "flat key=value config file; flags override it");
    add_value(cmd, "--preset", "preset", "built-in initial mesh (lshape)");
    add_value(cmd, "--mesh", "mesh", "initial mesh file");
    add_value(cmd, "--model", "model", "stokes or elasticity");
    add_value(cmd, "--nu", "nu", "Stokes viscosity");
    add_value(cmd, "--mu", "mu", "shear modulus");
    add_value(cmd, "--lame", "lame", "Lame lambda");
    add_value(cmd, "--theta", "theta", "Dorfler bulk parameter in (0,1)");
    add_value(cmd, "--k", "k", "stress polynomial degree (>= 3)");
    add_value(cmd, "--target", "target", "index of the tracked eigenvalue");
    add_value(cmd, "--max-dof", "max_dof", "stop once dim V reaches this");
    add_value(cmd, "--eta-tol", "eta_tol", "stop once eta falls below this");
    add_value(cmd, "--max-levels", "max_levels", "maximal number of levels");
    add_flag(cmd, "--postprocess", "postprocess", "compute u*, lambda* and eta*");
    add_value(cmd, "--m", "m", "postprocessing degree (>= k+1)");
    add_value(cmd, "--mark-estimator", "mark_estimator", "eta or eta_star");
    add_value(cmd, "--shift", "shift", "fixed eigensolver shift");
    add_value(cmd, "--tol", "tol", "eigensolver residual tolerance");
    add_value(cmd, "--max-iters", "max_iters", "eigensolver operator applications");
    add_value(cmd, "--nev", "nev", "number of eigenpairs computed");
    add_value(cmd, "--seed", "seed", "start vector seed");
    add_value(cmd, "--threads", "threads", "threads for element loops");
    add_value(cmd, "--timing", "timing", "record wall time per level (0 for reproducible output)");
    add_value(cmd, "--levels", "levels", "uniform refinement levels");
    add_value(cmd, "--out", "out", "output directory");
    add_flag(cmd, "--save-meshes", "save_meshes", "write the mesh of every level");
    add_flag(cmd, "--dump-estimator", "dump_estimator", "write element indicators of every level");
    add_flag(cmd, "--dump-matrices", "dump_matrices", "write the assembled matrices (MatrixMarket)");
    return owned;
}

int report(const char* context, hreig_status status) {
    const std::string stage = hreig_last_stage();
    if (stage.empty())
        std::fprintf(stderr, "hreig: %s: %s\n", context, hreig_last_error());
    else
        std::fprintf(stderr, "hreig: %s failed in stage '%s': %s\n", context, stage.c_str(), hreig_last_error());
    return status == HREIG_ERR_CONFIG || status == HREIG_ERR_INVALID_ARGUMENT ? 2 : 1;
}

void print_history(const hreig_history* history) {
    const size_t n = hreig_history_count(history);
    if (n == 0) return;
    std::printf("%5s %8s %9s %8s %20s %14s %20s\n", "level", "ntri", "dim_sigma", "dim_v", "lambda", "eta",
                "lambda_star");
    for (size_t i = 0; i < n; ++i) {
        hreig_level_record r{};
        hreig_history_record(history, i, &r);
        std::printf("%5d %8d %9d %8d %20.12g %14.6e", r.level, r.ntri, r.dim_sigma, r.dim_v, r.lambda, r.eta);
        if (r.has_lambda_star) std::printf(" %20.12g", r.lambda_star);
        std::printf("\n");
    }
}

int run_command(const std::string& name, const Command& cmd) {
    hreig_config* raw = nullptr;
    if (hreig_config_create(&raw) != HREIG_OK) return report("config", HREIG_ERR_INTERNAL);
    std::unique_ptr<hreig_config, ConfigDeleter> config(raw);

    hreig_status st = hreig_config_set(config.get(), "subcommand", name.c_str());
    if (st != HREIG_OK) return report("config", st);
    if (!cmd.config_file.empty()) {
        st = hreig_config_load(config.get(), cmd.config_file.c_str());
        if (st != HREIG_OK) return report("config", st == HREIG_ERR_IO ? HREIG_ERR_CONFIG : st);
        // the subcommand on the command line wins over a replayed manifest
        hreig_config_set(config.get(), "subcommand", name.c_str());
    }
    for (const auto& f : cmd.options) {
        if (f->option->count() == 0) continue;
        const std::string value = f->flag ? (f->flag_value ? "true" : "false") : f->value;
        st = hreig_config_set(config.get(), f->key.c_str(), value.c_str());
        if (st != HREIG_OK) return report("config", st);
    }
    st = hreig_config_validate(config.get());
    if (st != HREIG_OK) return report("config", st);

    hreig_history* hist = nullptr;
    st = hreig_execute(config.get(), &hist);
    std::unique_ptr<hreig_history, HistoryDeleter> history(hist);
    if (history) print_history(history.get());
    if (st != HREIG_OK) return report(name.c_str(), st);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive mixed finite elements for the Hellinger-Reissner eigenvalue problem"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hreig_version()));
    std::vector<std::pair<std::string, std::unique_ptr<Command>>> commands;
    commands.emplace_back("run", make_command(app, "run", "adaptive SOLVE-ESTIMATE-MARK-REFINE loop"));
    commands.emplace_back("uniform", make_command(app, "uniform", "uniform bisection levels"));
    commands.emplace_back("dump-mesh", make_command(app, "dump-mesh", "write the (uniformly refined) initial mesh"));
    commands.emplace_back("dump-estimator",
                          make_command(app, "dump-estimator", "solve once and write the element indicators"));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    for (const auto& [name, cmd] : commands)
        if (cmd->app->parsed()) return run_command(name, *cmd);
    return 2;
}

#include "doctest.h"

#include "config.hpp"
#include "error.hpp"

#include <filesystem>
#include <fstream>

using namespace hreig;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

}  // namespace

TEST_CASE("defaults describe the L-shape Stokes run") {
    const RunSpec s;
    CHECK(option_value(s, "preset") == "lshape");
    CHECK(option_value(s, "model") == "stokes");
    CHECK(option_value(s, "theta") == "0.5");
    CHECK(option_value(s, "k") == "3");
    CHECK(option_value(s, "max_dof") == "50000");
    CHECK(option_value(s, "m") == "4");
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("unknown keys and malformed values are config errors") {
    RunSpec s;
    auto kind = [&](const std::string& k, const std::string& v) {
        try {
            set_option(s, k, v);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Internal;
    };
    CHECK(kind("thetta", "0.5") == ErrorKind::Config);
    CHECK(kind("theta", "half") == ErrorKind::Config);
    CHECK(kind("k", "3.5") == ErrorKind::Config);
    CHECK(kind("postprocess", "maybe") == ErrorKind::Config);
    CHECK(kind("mark_estimator", "zeta") == ErrorKind::Config);
}

TEST_CASE("range checks") {
    RunSpec s;
    set_option(s, "theta", "1.5");
    try {
        validate(s);
        FAIL("theta accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("theta") != std::string::npos);
    }
    s = {};
    set_option(s, "k", "2");
    CHECK_THROWS_AS(validate(s), Error);
    s = {};
    set_option(s, "mark_estimator", "eta_star");
    CHECK_THROWS_AS(validate(s), Error);
    set_option(s, "postprocess", "true");
    CHECK_NOTHROW(validate(s));
    set_option(s, "m", "3");
    CHECK_THROWS_AS(validate(s), Error);
    s = {};
    set_option(s, "preset", "square");
    CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("manifest replays to the same settings") {
    RunSpec s;
    set_option(s, "model", "elasticity");
    set_option(s, "mu", "2.5");
    set_option(s, "lame", "0.1");
    set_option(s, "theta", "0.3");
    set_option(s, "eta_tol", "1e-4");
    set_option(s, "shift", "20");
    set_option(s, "timing", "0");
    set_option(s, "out", "somewhere");
    const std::string text = manifest(s);
    CHECK(text.rfind(std::string("artifact_version=") + artifact_version() + "\n", 0) == 0);
    for (const std::string& key : config_keys()) CHECK(text.find("\n" + key + "=") != std::string::npos);

    RunSpec r;
    load_config(r, temp_file("hreig_manifest_test.txt", text));
    CHECK(manifest(r) == text);
    const AdaptConfig a = adapt_config(r);
    CHECK(a.model.kind() == ComplianceModel::Kind::Elasticity);
    CHECK(a.theta == 0.3);
    CHECK(a.solver.shift.value() == 20.0);
    CHECK_FALSE(a.timing);
}

TEST_CASE("config files: comments, whitespace and line numbers") {
    RunSpec s;
    load_config(s, temp_file("hreig_cfg_ok.txt", "# comment\n  theta = 0.25   # trailing\n\nk=4\n"));
    CHECK(s.adapt.theta == 0.25);
    CHECK(s.adapt.k == 4);
    try {
        load_config(s, temp_file("hreig_cfg_bad.txt", "theta=0.2\nbogus=1\n"));
        FAIL("unknown key accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config(s, "/nonexistent/hreig.cfg"), Error);
}

TEST_CASE("execute writes the manifest and history") {
    RunSpec s;
    const auto dir = std::filesystem::temp_directory_path() / "hreig_execute_test";
    std::filesystem::remove_all(dir);
    set_option(s, "subcommand", "uniform");
    set_option(s, "levels", "1");
    set_option(s, "timing", "false");
    set_option(s, "out", dir.string());
    const ConvergenceHistory h = execute(s);
    CHECK(h.levels.size() == 2);
    CHECK(std::filesystem::exists(dir / "manifest.txt"));
    CHECK(std::filesystem::exists(dir / "history.csv"));
    std::filesystem::remove_all(dir);
}

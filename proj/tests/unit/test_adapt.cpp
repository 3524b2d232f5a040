#include "doctest.h"

#include "adapt.hpp"
#include "error.hpp"
#include "support.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

using namespace hreig;

TEST_CASE("dorfler marking on equal indicators takes the first half") {
    const std::vector<double> eq(10, 1.0);
    const auto m = mark_dorfler(eq, 0.5);
    CHECK(m == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("dorfler marking takes a dominant indicator alone") {
    std::vector<double> v(100, 0.01 / 99.0);
    v[37] = 0.99;
    CHECK(mark_dorfler(v, 0.5) == std::vector<int>{37});
}

TEST_CASE("dorfler marked sets reach the bulk and are minimal") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 60);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> v(len(rng));
        for (double& x : v) x = std::pow(u(rng), 3);
        if (trial % 7 == 0) std::fill(v.begin(), v.begin() + v.size() / 2, 0.25);  // ties
        const double theta = 0.05 + 0.9 * u(rng);
        const auto m = mark_dorfler(v, theta);
        const double total = std::accumulate(v.begin(), v.end(), 0.0);
        double sum = 0.0;
        for (int i : m) sum += v[i];
        REQUIRE(sum >= theta * total);
        // any set with one element fewer sums to at most the largest |M|-1 values
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        const double best = std::accumulate(sorted.begin(), sorted.begin() + (m.size() - 1), 0.0);
        REQUIRE(best < theta * total);
    }
}

TEST_CASE("dorfler marking rejects bad input") {
    const std::vector<double> v{1.0, 2.0};
    CHECK_THROWS_AS(mark_dorfler(v, 0.0), Error);
    CHECK_THROWS_AS(mark_dorfler(v, 1.0), Error);
    CHECK_THROWS_AS(mark_dorfler(std::vector<double>{}, 0.5), Error);
    CHECK_THROWS_AS(mark_dorfler(std::vector<double>{1.0, -1.0}, 0.5), Error);
}

TEST_CASE("a short adaptive run") {
    AdaptConfig cfg;
    cfg.max_dof = 600;
    cfg.postprocess = true;
    cfg.timing = false;
    std::vector<LevelState> seen;
    const ConvergenceHistory h = afem_run(initial_lshape(), cfg, [&](const LevelState& s) { seen.push_back(s); });
    REQUIRE(h.levels.size() >= 3);
    REQUIRE(seen.size() == h.levels.size());
    for (std::size_t i = 0; i < h.levels.size(); ++i) {
        const LevelRecord& r = h.levels[i];
        CHECK(r.level == static_cast<int>(i));
        CHECK(r.ntri == seen[i].mesh->num_triangles());
        CHECK(r.dim_sigma == seen[i].sigma_space->dim());
        CHECK(r.lambda_star.has_value());
        CHECK(r.eta_star.has_value());
        CHECK(r.seconds == 0.0);
        CHECK(r.lambda > 25.0);
        CHECK(r.lambda < 40.0);
        const bool last = i + 1 == h.levels.size();
        CHECK((r.dim_v >= cfg.max_dof) == last);
        CHECK(r.nmarked == static_cast<int>(seen[i].marked.size()));
        CHECK((r.nmarked == 0) == last);
        if (i > 0) {
            CHECK(r.ntri > h.levels[i - 1].ntri);
            CHECK(is_refinement_of(*seen[i].mesh, *seen[i - 1].mesh));
        }
    }
    std::ostringstream csv;
    h.write_csv(csv);
    CHECK(csv.str().rfind("level,ntri,dim_sigma,dim_v,lambda,lambda_star,eta,eta_star,nmarked,seconds\n", 0) == 0);
}

TEST_CASE("eta tolerance and level cap stop the loop") {
    AdaptConfig cfg;
    cfg.max_dof = 1000000;
    cfg.eta_tol = 1e6;
    CHECK(afem_run(initial_lshape(), cfg).levels.size() == 1);
    cfg.eta_tol.reset();
    cfg.max_levels = 2;
    CHECK(afem_run(initial_lshape(), cfg).levels.size() == 2);
}

TEST_CASE("uniform runs double the triangle count per level") {
    AdaptConfig cfg;
    const ConvergenceHistory h = uniform_run(initial_lshape(), cfg, 2);
    REQUIRE(h.levels.size() == 3);
    for (int l = 0; l < 3; ++l) CHECK(h.levels[l].ntri == 6 << l);
}

TEST_CASE("failures report the stage and the partial history") {
    AdaptConfig cfg;
    cfg.max_dof = 100000;
    try {
        afem_run(initial_lshape(), cfg, [](const LevelState& s) {
            if (s.level == 2) fail(ErrorKind::Io, "observer refused");
        });
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "observe");
        CHECK(e.kind() == ErrorKind::Io);
        CHECK(e.partial().levels.size() == 3);
    }
}

TEST_CASE("invalid adaptive configurations") {
    AdaptConfig cfg;
    cfg.theta = 1.5;
    CHECK_THROWS_AS(afem_run(initial_lshape(), cfg), Error);
    cfg = {};
    cfg.k = 2;
    CHECK_THROWS_AS(afem_run(initial_lshape(), cfg), Error);
    cfg = {};
    cfg.mark = MarkEstimator::EtaStar;
    CHECK_THROWS_AS(afem_run(initial_lshape(), cfg), Error);
    cfg = {};
    cfg.postprocess = true;
    cfg.post_degree = 3;
    CHECK_THROWS_AS(afem_run(initial_lshape(), cfg), Error);
    CHECK_THROWS_AS(uniform_run(initial_lshape(), AdaptConfig{}, -1), Error);
}

#include "adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace hreig {

std::vector<int> mark_dorfler(std::span<const double> indicators, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) fail(ErrorKind::InvalidArgument, "theta must lie in (0,1)");
    if (indicators.empty()) fail(ErrorKind::InvalidArgument, "mark_dorfler: empty estimator");
    for (double v : indicators)
        if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::Numeric, "mark_dorfler: indicator is negative or not finite");

    std::vector<int> order(indicators.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return indicators[a] != indicators[b] ? indicators[a] > indicators[b] : a < b;
    });
    double total = 0.0;
    for (int i : order) total += indicators[i];
    const double goal = theta * total;

    std::vector<int> marked;
    double sum = 0.0;
    for (int i : order) {
        if (sum >= goal) break;
        sum += indicators[i];
        marked.push_back(i);
    }
    return marked;
}

void ConvergenceHistory::write_csv(std::ostream& out) const {
    out << "level,ntri,dim_sigma,dim_v,lambda,lambda_star,eta,eta_star,nmarked,seconds\n";
    out << std::setprecision(12);
    for (const LevelRecord& r : levels) {
        out << r.level << ',' << r.ntri << ',' << r.dim_sigma << ',' << r.dim_v << ',' << r.lambda << ',';
        if (r.lambda_star) out << *r.lambda_star;
        out << ',' << r.eta << ',';
        if (r.eta_star) out << *r.eta_star;
        out << ',' << r.nmarked << ',' << r.seconds << '\n';
    }
}

void ConvergenceHistory::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path);
    write_csv(out);
    if (!out) fail(ErrorKind::Io, "error while writing " + path);
}

namespace {

void validate(const AdaptConfig& cfg) {
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) fail(ErrorKind::Config, "theta must lie in (0,1)");
    if (cfg.k < 3) fail(ErrorKind::Config, "k must be at least 3");
    if (cfg.target < 1) fail(ErrorKind::Config, "target eigenvalue index must be at least 1");
    if (cfg.max_dof <= 0 && !cfg.eta_tol) fail(ErrorKind::Config, "stopping rule needs max_dof or eta_tol");
    if (cfg.eta_tol && !(*cfg.eta_tol > 0.0)) fail(ErrorKind::Config, "eta_tol must be positive");
    if (cfg.max_levels < 1) fail(ErrorKind::Config, "max_levels must be positive");
    const int m = cfg.post_degree < 0 ? cfg.k + 1 : cfg.post_degree;
    if (m < cfg.k + 1) fail(ErrorKind::Config, "postprocessing degree m must be at least k+1");
    if (cfg.mark == MarkEstimator::EtaStar && !cfg.postprocess)
        fail(ErrorKind::Config, "marking with eta_star requires postprocessing");
    if (cfg.threads < 1) fail(ErrorKind::Config, "threads must be positive");
}

template <class F>
auto stage(const char* name, const ConvergenceHistory& history, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(e, name, history);
    } catch (const std::exception& e) {
        throw StageError(Error(ErrorKind::Internal, e.what()), name, history);
    }
}

/// uniform_levels < 0 selects adaptive refinement.
ConvergenceHistory run_pipeline(const Mesh& initial, const AdaptConfig& cfg, int uniform_levels,
                                const LevelObserver& observer) {
    validate(cfg);
    const bool uniform = uniform_levels >= 0;
    const int m = cfg.post_degree < 0 ? cfg.k + 1 : cfg.post_degree;
    ConvergenceHistory history;
    auto mesh = std::make_shared<const Mesh>(initial);
    std::shared_ptr<const DisplacementSpace> prev_space;
    Eigen::VectorXd prev_u;
    double prev_lambda = 0.0;

    for (int level = 0;; ++level) {
        const auto start = std::chrono::steady_clock::now();
        LevelState st;
        st.level = level;
        st.mesh = mesh;
        stage("setup", history, [&] {
            st.sigma_space = std::make_shared<const StressSpace>(mesh, cfg.k);
            st.u_space = std::make_shared<const DisplacementSpace>(mesh, cfg.k);
            return 0;
        });
        stage("assemble", history, [&] {
            AssemblyOptions opts;
            opts.threads = cfg.threads;
            st.system = std::make_shared<const BlockSystem>(assemble(*st.sigma_space, *st.u_space, cfg.model, opts));
            return 0;
        });
        stage("solve", history, [&] {
            SolverConfig sc = cfg.solver;
            sc.nev = std::max(sc.nev, cfg.target);
            st.shift = cfg.solver.shift ? *cfg.solver.shift : (level == 0 ? 1.0 : 0.1 * prev_lambda);
            sc.shift = st.shift;
            auto pairs = solve_eigen(*st.system, sc);
            st.pair = std::move(pairs[cfg.target - 1]);
            if (prev_space) {
                const Eigen::VectorXd ref = prolong(*prev_space, *st.u_space, prev_u);
                if (align(st.pair.u, ref, st.system->mass) < 0) {
                    st.pair.u = -st.pair.u;
                    st.pair.sigma = -st.pair.sigma;
                    st.pair.pressure_multiplier = -st.pair.pressure_multiplier;
                }
            }
            return 0;
        });
        stage("estimate", history, [&] {
            st.estimator = eta_local_all(*st.sigma_space, *st.u_space, cfg.model, st.pair.sigma, st.pair.u, cfg.threads);
            return 0;
        });

        LevelRecord rec;
        rec.level = level;
        rec.ntri = mesh->num_triangles();
        rec.dim_sigma = st.sigma_space->dim();
        rec.dim_v = st.u_space->dim();
        rec.lambda = st.pair.lambda;
        rec.eta = std::sqrt(eta_global(st.estimator));

        if (cfg.postprocess) {
            stage("postprocess", history, [&] {
                st.reconstruction = reconstruct(*st.sigma_space, *st.u_space, cfg.model, st.pair.sigma, st.pair.u, m,
                                                cfg.threads);
                const double ls = lambda_star(*st.sigma_space, *st.reconstruction, st.pair.sigma);
                st.star = eta_star(*st.sigma_space, cfg.model, st.pair.sigma, *st.reconstruction, ls, cfg.threads);
                rec.lambda_star = ls;
                rec.eta_star = std::sqrt(eta_star_global(*st.star));
                return 0;
            });
        }

        bool last;
        if (uniform) {
            last = level >= uniform_levels;
        } else {
            last = rec.dim_v >= cfg.max_dof || (cfg.eta_tol && rec.eta <= *cfg.eta_tol) || level + 1 >= cfg.max_levels;
        }

        Mesh next;
        if (!last) {
            stage("mark", history, [&] {
                if (uniform) {
                    st.marked.resize(mesh->num_triangles());
                    std::iota(st.marked.begin(), st.marked.end(), 0);
                } else {
                    const std::vector<double> ind =
                        cfg.mark == MarkEstimator::EtaStar ? st.star->totals() : st.estimator.totals();
                    st.marked = mark_dorfler(ind, cfg.theta);
                    if (st.marked.empty()) fail(ErrorKind::Numeric, "estimator vanishes; nothing to mark");
                }
                return 0;
            });
            rec.nmarked = static_cast<int>(st.marked.size());
        }
        if (cfg.timing)
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        history.levels.push_back(rec);
        if (observer) stage("observe", history, [&] {
                observer(st);
                return 0;
            });
        if (last) break;

        stage("refine", history, [&] {
            next = uniform ? bisect_all(*mesh) : bisect(*mesh, st.marked);
            return 0;
        });
        prev_space = st.u_space;
        prev_u = st.pair.u;
        prev_lambda = st.pair.lambda;
        mesh = std::make_shared<const Mesh>(std::move(next));
    }
    return history;
}

}  // namespace

ConvergenceHistory afem_run(const Mesh& initial, const AdaptConfig& config, const LevelObserver& observer) {
    return run_pipeline(initial, config, -1, observer);
}

ConvergenceHistory uniform_run(const Mesh& initial, const AdaptConfig& config, int levels,
                               const LevelObserver& observer) {
    if (levels < 0) fail(ErrorKind::Config, "levels must be non-negative");
    return run_pipeline(initial, config, levels, observer);
}

}  // namespace hreig

#pragma once

#include "assembly.hpp"
#include "eigensolver.hpp"
#include "estimator.hpp"
#include "postprocess.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hreig {

enum class MarkEstimator { Eta, EtaStar };

struct AdaptConfig {
    double theta = 0.5;
    int k = 3;
    int target = 1;  // 1-based index of the tracked eigenvalue
    ComplianceModel model = ComplianceModel::stokes(1.0);
    long max_dof = 50000;              // stop once dim V reaches this
    std::optional<double> eta_tol;     // stop once eta <= eta_tol
    int max_levels = 1000;
    SolverConfig solver;               // solver.shift fixed for all levels when set
    bool postprocess = false;
    int post_degree = -1;              // m; -1 means k + 1
    MarkEstimator mark = MarkEstimator::Eta;
    int threads = 1;
    bool timing = true;                // false writes 0 seconds so histories are reproducible
};

struct LevelRecord {
    int level = 0;
    int ntri = 0;
    int dim_sigma = 0;
    int dim_v = 0;
    double lambda = 0.0;
    std::optional<double> lambda_star;
    double eta = 0.0;
    std::optional<double> eta_star;
    int nmarked = 0;
    double seconds = 0.0;
};

struct ConvergenceHistory {
    std::vector<LevelRecord> levels;

    void write_csv(std::ostream& out) const;
    void save_csv(const std::string& path) const;
};

/// Everything computed on one level, handed to the observer before marking.
struct LevelState {
    int level = 0;
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const StressSpace> sigma_space;
    std::shared_ptr<const DisplacementSpace> u_space;
    std::shared_ptr<const BlockSystem> system;
    EigenPair pair;
    double shift = 0.0;
    EstimatorReport estimator;
    std::optional<ReconstructedField> reconstruction;
    std::optional<StarReport> star;
    std::vector<int> marked;  // filled after marking; empty on the last level
};

using LevelObserver = std::function<void(const LevelState&)>;

/// Smallest set (ties by ascending element id) whose indicator sum reaches theta times the total.
std::vector<int> mark_dorfler(std::span<const double> indicators, double theta);

/// SOLVE, ESTIMATE, MARK, REFINE until dim V >= max_dof or eta <= eta_tol.
/// Failures are rethrown as StageError carrying the partial history.
ConvergenceHistory afem_run(const Mesh& initial, const AdaptConfig& config, const LevelObserver& observer = {});

/// Same pipeline with every triangle bisected once per level; records levels 0..levels.
ConvergenceHistory uniform_run(const Mesh& initial, const AdaptConfig& config, int levels,
                               const LevelObserver& observer = {});

class StageError : public Error {
public:
    StageError(const Error& cause, std::string stage, ConvergenceHistory partial)
        : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)), partial_(std::move(partial)) {}

    const std::string& stage() const { return stage_; }
    const ConvergenceHistory& partial() const { return partial_; }

private:
    std::string stage_;
    ConvergenceHistory partial_;
};

}  // namespace hreig

#pragma once

#include "spectune/bayes_opt.hpp"
#include "spectune/pique.hpp"
#include "spectune/tomo.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace spectune {

// Equispaced search grid over the filter parameters, endpoints exact.
struct GridDomain {
    Eigen::VectorXd rho_axis;   // points values from 1 to 10
    Eigen::VectorXd omega_axis; // points values from 0.1 to 1

    static GridDomain make(int points);
};

// One candidate per row, rho-major: row i * M + j is (rho_axis[i], omega_axis[j]).
Points candidate_matrix(const GridDomain& domain);

// Everything needed to evaluate the tuning objective: per-slice projection
// data sharing one geometry, the reconstruction size, and the scoring
// configuration. The cache and counter are logically transparent bookkeeping,
// hence mutable.
struct ObjectiveContext {
    std::vector<Sinogram> sinograms;
    int reconstruction_size = 0;
    PiqueConfig pique_config{};
    // Round reconstructed slices to float32 before scoring, so scores computed
    // here match scores recomputed from float32 volume exports bit for bit.
    bool quantize_float32 = false;

    mutable std::map<std::pair<long long, long long>, double> cache;
    mutable long reconstructions = 0; // cache misses, i.e. full slice-set FBPs
};

void validate(const ObjectiveContext& ctx);

// Negated mean slice PIQUE of the volume reconstructed at params. Memoized.
double objective_value(const ObjectiveContext& ctx, const FilterParams& params);

struct GridOracleResult {
    FilterParams best;
    double best_value = 0.0; // objective scale (negated mean PIQUE)
    Eigen::VectorXd rho_axis;
    Eigen::VectorXd omega_axis;
    Eigen::MatrixXd values; // rho x omega objective table, NaN where aborted
    bool complete = false;
};

// Exhaustive evaluation on a coarse subgrid with the same endpoints as the
// search grid. A failed evaluation aborts the sweep but the partial table is
// still returned. Ties resolve toward the lowest (rho, omega) indices.
GridOracleResult grid_oracle(const ObjectiveContext& ctx, int coarse_m);

// Generic core used by grid_oracle; exposed for callers that bring their own
// objective (tests, landscape sweeps over analytic surrogates).
GridOracleResult
grid_scan(const std::function<double(const FilterParams&)>& objective, int coarse_m);

struct TraceRow {
    int observation = 0; // 1-based position in the evaluation order
    double rho = 0.0;
    double omega0 = 0.0;
    double objective = 0.0; // negated mean PIQUE
    double pique = 0.0;     // 0-100 scale
    double beta = 0.0;      // acquisition weight; 0 for initialization rows
    bool from_init = false;
};

struct TuningReport {
    FilterParams best_params;
    double best_objective = 0.0;
    double best_pique = 0.0; // = -best_objective
    std::vector<TraceRow> trace;
    std::string schedule;
    std::string init_name;
    double wall_seconds = 0.0;
    std::vector<double> simple_regret_curve; // vs a supplied oracle
    double cumulative_regret = 0.0;
    bool has_regret = false;
};

const char* schedule_name(BetaKind kind);

// Runs the optimizer against objective_value. The overload taking an oracle
// attaches regret diagnostics, measured against the better of the oracle's
// best cell and the run's own best observation.
TuningReport tune(const ObjectiveContext& ctx, const BoConfig& config,
                  const std::string& init_name = "");
TuningReport tune(const ObjectiveContext& ctx, const BoConfig& config,
                  const GridOracleResult& oracle, const std::string& init_name = "");

} // namespace spectune

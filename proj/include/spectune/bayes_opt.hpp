#pragma once

#include "spectune/kernels.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace spectune {

enum class BetaKind { Constant, Increasing, Decreasing };

struct BetaSchedule {
    BetaKind kind = BetaKind::Increasing;
    double lambda = 0.9;        // Decreasing only, must lie in (0,1)
    double norm_estimate = 0.0; // Constant/Decreasing, refreshed by the loop
};

// Exploration weight for step m (1-based).
double beta_value(const BetaSchedule& schedule, int m);

struct BoConfig {
    Kernel kernel{KernelFamily::Matern, 0.1};
    BetaSchedule schedule;
    Points init_set;       // zero rows allowed for the Increasing schedule only
    int budget = 20;       // total objective evaluations, init included
    Points candidate_grid; // search grid, one point per row
    double snap_tolerance = 1e-6; // max distance when snapping init points to the grid
};

void validate(const BoConfig& config);

struct BoState {
    Points observed_sites;
    Eigen::VectorXd observed_values;
    std::vector<Eigen::Index> observed_grid_indices; // same order as observed_sites
    int step = 0;                                    // acquisition steps taken so far
    double norm_estimate = 0.0;                      // refreshed after every observation
};

struct BoReport {
    Point best_site;
    double best_value = 0.0;
    BoState history;
    std::vector<double> beta_trace;          // one weight per acquisition step
    std::vector<double> simple_regret_curve; // filled when the true optimum is supplied
    double cumulative_regret = 0.0;
    bool has_regret = false;
};

using Objective = std::function<double(const Point&)>;

// Raised when the objective callback itself fails; carries everything observed
// before the failure.
class evaluation_error : public std::runtime_error {
public:
    evaluation_error(const std::string& what, BoState partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const BoState& partial_history() const { return partial_; }

private:
    BoState partial_;
};

// Upper-confidence score fhat(x) + beta_m * P^2(x) for a single candidate.
double acquisition(const Kernel& kernel, const BoState& state, double beta_m,
                   const Point& candidate);

// Evaluates the objective on the (snapped) init set and returns the starting state.
BoState bo_init(const BoConfig& config, const Objective& objective);

// One acquisition step: scan the unobserved grid, evaluate the winner, refresh
// the norm estimate. Ties resolve toward the lowest grid index.
BoState bo_step(const BoConfig& config, const BoState& state, const Objective& objective);

// Full loop: init evaluations followed by budget - |init| acquisition steps.
BoReport run_bo(const BoConfig& config, const Objective& objective);
BoReport run_bo(const BoConfig& config, const Objective& objective, double true_optimum_value);

// Cumulative regret and the running simple-regret curve against a known optimum.
std::pair<double, std::vector<double>> regrets(const Eigen::VectorXd& observed_values,
                                               double true_optimum_value);

// Named initialization sets: "single", "four", or "nine".
Points init_preset(const std::string& name);

} // namespace spectune

#include "spectune/bayes_opt.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace spectune {

double beta_value(const BetaSchedule& schedule, int m) {
    if (m < 1)
        throw input_error("beta_value: step index must be at least 1");
    switch (schedule.kind) {
    case BetaKind::Constant:
        return schedule.norm_estimate;
    case BetaKind::Increasing: {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        return std::sqrt(std::log((10.0 / 3.0) * static_cast<double>(m) * m * pi2));
    }
    case BetaKind::Decreasing:
        return std::pow(schedule.lambda, m - 1) * schedule.norm_estimate;
    }
    throw input_error("beta_value: unknown schedule kind");
}

namespace {

Eigen::Index snap_to_grid(const Points& grid, const Point& x, double tolerance) {
    Eigen::Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index g = 0; g < grid.rows(); ++g) {
        const double d = (grid.row(g).transpose() - x).norm();
        if (d < best_dist) {
            best_dist = d;
            best = g;
        }
    }
    if (best < 0 || best_dist > tolerance)
        throw input_error("init point lies farther than the snap tolerance from every grid node");
    return best;
}

double call_objective(const Objective& objective, const Point& x, const BoState& so_far) {
    double value = 0.0;
    try {
        value = objective(x);
    } catch (const std::exception& e) {
        throw evaluation_error(std::string("objective evaluation failed: ") + e.what(), so_far);
    }
    if (std::isnan(value))
        throw evaluation_error("objective evaluation returned NaN", so_far);
    return value;
}

void refresh_norm(const Kernel& kernel, BoState& state) {
    SampleSet data{state.observed_sites, state.observed_values};
    state.norm_estimate = rkhs_norm_estimate(fit_interpolant(kernel, data));
}

} // namespace

void validate(const BoConfig& config) {
    if (config.budget < 1)
        throw input_error("bo config: budget must be positive");
    if (config.candidate_grid.rows() == 0)
        throw input_error("bo config: empty candidate grid");
    if (config.init_set.rows() >= config.budget)
        throw input_error("bo config: init set must be smaller than the budget");
    if (config.init_set.rows() == 0 && config.schedule.kind != BetaKind::Increasing)
        throw input_error("bo config: this schedule needs a norm estimate, so the init set "
                          "cannot be empty");
    if (config.schedule.kind == BetaKind::Decreasing &&
        !(config.schedule.lambda > 0.0 && config.schedule.lambda < 1.0))
        throw input_error("bo config: decreasing schedule needs lambda in (0,1)");
    if (config.init_set.rows() > 0 && config.init_set.cols() != config.candidate_grid.cols())
        throw input_error("bo config: init set dimension differs from the grid");
    if (!(config.snap_tolerance >= 0.0))
        throw input_error("bo config: snap tolerance must be nonnegative");
    std::vector<Eigen::Index> snapped;
    for (Eigen::Index i = 0; i < config.init_set.rows(); ++i) {
        const Eigen::Index g =
            snap_to_grid(config.candidate_grid, config.init_set.row(i).transpose(),
                         config.snap_tolerance);
        for (Eigen::Index other : snapped)
            if (other == g)
                throw input_error("bo config: two init points snap to the same grid node");
        snapped.push_back(g);
    }
}

double acquisition(const Kernel& kernel, const BoState& state, double beta_m,
                   const Point& candidate) {
    if (state.observed_sites.rows() == 0)
        throw input_error("acquisition: no observations yet");
    SampleSet data{state.observed_sites, state.observed_values};
    const Interpolant model = fit_interpolant(kernel, data);
    const double fhat = eval_interpolant(model, candidate);
    const double p2 = power_function_squared(kernel, state.observed_sites, candidate);
    return fhat + beta_m * p2;
}

BoState bo_init(const BoConfig& config, const Objective& objective) {
    validate(config);
    BoState state;
    const Eigen::Index k = config.init_set.rows();
    state.observed_sites = Points(k, config.candidate_grid.cols());
    state.observed_values = Eigen::VectorXd(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index g =
            snap_to_grid(config.candidate_grid, config.init_set.row(i).transpose(),
                         config.snap_tolerance);
        const Point site = config.candidate_grid.row(g).transpose();
        BoState partial = state;
        partial.observed_sites.conservativeResize(i, Eigen::NoChange);
        partial.observed_values.conservativeResize(i);
        state.observed_values[i] = call_objective(objective, site, partial);
        state.observed_sites.row(i) = site.transpose();
        state.observed_grid_indices.push_back(g);
    }
    if (k > 0)
        refresh_norm(config.kernel, state);
    return state;
}

BoState bo_step(const BoConfig& config, const BoState& state, const Objective& objective) {
    const Eigen::Index n = config.candidate_grid.rows();
    const Eigen::Index observed = state.observed_sites.rows();

    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Eigen::Index g : state.observed_grid_indices)
        if (g >= 0 && g < n)
            taken[static_cast<std::size_t>(g)] = true;
    if (observed >= n)
        throw state_error("bo_step: candidate grid exhausted");

    BetaSchedule schedule = config.schedule;
    schedule.norm_estimate = state.norm_estimate;
    const double beta = beta_value(schedule, state.step + 1);

    // The scan reuses one Cholesky factor per step; per candidate it performs
    // the same serial sums acquisition() does, so both routes agree bitwise.
    Eigen::VectorXd coeffs(observed);
    detail::CholeskyFactor factor;
    const double kqq = config.kernel.from_distance(0.0);
    if (observed > 0) {
        const Eigen::MatrixXd k = kernel_matrix(config.kernel, state.observed_sites);
        factor = detail::factor_spd(k, 0.0);
        const Eigen::MatrixXd& lower_matrix = factor.lower;
        const auto lower = lower_matrix.triangularView<Eigen::Lower>();
        coeffs = lower.solve(state.observed_values);
        lower.transpose().solveInPlace(coeffs);
    }

    Eigen::Index best = -1;
    double best_eta = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd kx(observed);
    for (Eigen::Index g = 0; g < n; ++g) {
        if (taken[static_cast<std::size_t>(g)])
            continue;
        double eta;
        if (observed == 0) {
            eta = beta * kqq;
        } else {
            double fhat = 0.0;
            for (Eigen::Index i = 0; i < observed; ++i) {
                kx[i] = config.kernel.from_distance(
                    (state.observed_sites.row(i) - config.candidate_grid.row(g)).norm());
                fhat += coeffs[i] * kx[i];
            }
            eta = fhat + beta * detail::power_squared_from_factor(factor, kx, kqq);
        }
        if (eta > best_eta) {
            best_eta = eta;
            best = g;
        }
    }
    if (best < 0)
        throw state_error("bo_step: candidate grid exhausted");

    const Point site = config.candidate_grid.row(best).transpose();
    const double value = call_objective(objective, site, state);

    BoState next = state;
    next.observed_sites.conservativeResize(observed + 1, Eigen::NoChange);
    next.observed_sites.row(observed) = site.transpose();
    next.observed_values.conservativeResize(observed + 1);
    next.observed_values[observed] = value;
    next.observed_grid_indices.push_back(best);
    next.step = state.step + 1;
    refresh_norm(config.kernel, next);
    return next;
}

BoReport run_bo(const BoConfig& config, const Objective& objective) {
    BoState state = bo_init(config, objective);
    const int steps = config.budget - static_cast<int>(config.init_set.rows());
    std::vector<double> beta_trace;
    beta_trace.reserve(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) {
        // Mirrors the weight bo_step derives internally for this step.
        BetaSchedule schedule = config.schedule;
        schedule.norm_estimate = state.norm_estimate;
        beta_trace.push_back(beta_value(schedule, state.step + 1));
        state = bo_step(config, state, objective);
    }

    BoReport report;
    report.beta_trace = std::move(beta_trace);
    Eigen::Index best_at = 0;
    report.best_value = state.observed_values.maxCoeff(&best_at);
    report.best_site = state.observed_sites.row(best_at).transpose();
    report.history = std::move(state);
    return report;
}

BoReport run_bo(const BoConfig& config, const Objective& objective, double true_optimum_value) {
    BoReport report = run_bo(config, objective);
    auto [cumulative, curve] = regrets(report.history.observed_values, true_optimum_value);
    report.cumulative_regret = cumulative;
    report.simple_regret_curve = std::move(curve);
    report.has_regret = true;
    return report;
}

std::pair<double, std::vector<double>> regrets(const Eigen::VectorXd& observed_values,
                                               double true_optimum_value) {
    if (observed_values.size() == 0)
        throw input_error("regrets: empty observation trace");
    if (observed_values.maxCoeff() > true_optimum_value + 1e-9)
        throw input_error("regrets: an observed value exceeds the declared optimum");
    double cumulative = 0.0;
    double running_max = -std::numeric_limits<double>::infinity();
    std::vector<double> curve(static_cast<std::size_t>(observed_values.size()));
    for (Eigen::Index t = 0; t < observed_values.size(); ++t) {
        cumulative += true_optimum_value - observed_values[t];
        running_max = std::max(running_max, observed_values[t]);
        curve[static_cast<std::size_t>(t)] = true_optimum_value - running_max;
    }
    return {cumulative, std::move(curve)};
}

Points init_preset(const std::string& name) {
    auto grid = [](std::initializer_list<double> rhos, std::initializer_list<double> omegas) {
        Points p(static_cast<Eigen::Index>(rhos.size() * omegas.size()), 2);
        Eigen::Index row = 0;
        for (double rho : rhos)
            for (double omega : omegas) {
                p(row, 0) = rho;
                p(row, 1) = omega;
                ++row;
            }
        return p;
    };
    if (name == "single")
        return grid({5.0}, {0.5});
    if (name == "four")
        return grid({4.0, 8.0}, {0.4, 0.8});
    if (name == "nine")
        return grid({3.0, 6.0, 9.0}, {0.3, 0.6, 0.9});
    throw input_error("init_preset: unknown preset '" + name + "'");
}

} // namespace spectune

#include "spectune/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace spectune {

namespace {

// Cache key quantization: fine enough to separate every node of a 10^7-point
// axis, coarse enough to absorb parser round-trips of printed parameters.
std::pair<long long, long long> cache_key(const FilterParams& params) {
    return {std::llround(params.rho * 1e7), std::llround(params.omega0 * 1e7)};
}

} // namespace

GridDomain GridDomain::make(int points) {
    if (points < 2)
        throw input_error("grid domain: needs at least two points per axis");
    GridDomain domain;
    domain.rho_axis = Eigen::VectorXd::LinSpaced(points, 1.0, 10.0);
    domain.omega_axis = Eigen::VectorXd::LinSpaced(points, 0.1, 1.0);
    return domain;
}

Points candidate_matrix(const GridDomain& domain) {
    const Eigen::Index m_rho = domain.rho_axis.size();
    const Eigen::Index m_omega = domain.omega_axis.size();
    Points grid(m_rho * m_omega, 2);
    for (Eigen::Index i = 0; i < m_rho; ++i)
        for (Eigen::Index j = 0; j < m_omega; ++j) {
            grid(i * m_omega + j, 0) = domain.rho_axis[i];
            grid(i * m_omega + j, 1) = domain.omega_axis[j];
        }
    return grid;
}

void validate(const ObjectiveContext& ctx) {
    if (ctx.sinograms.empty())
        throw input_error("objective context: needs at least one slice");
    if (ctx.reconstruction_size < 1)
        throw input_error("objective context: reconstruction size must be positive");
    validate(ctx.pique_config);
    for (const Sinogram& sino : ctx.sinograms) {
        validate(sino);
        if (sino.angles.size() != ctx.sinograms.front().angles.size() ||
            sino.offsets.size() != ctx.sinograms.front().offsets.size() ||
            (sino.angles - ctx.sinograms.front().angles).cwiseAbs().maxCoeff() != 0.0 ||
            (sino.offsets - ctx.sinograms.front().offsets).cwiseAbs().maxCoeff() != 0.0)
            throw input_error("objective context: sinograms disagree on geometry");
    }
}

double objective_value(const ObjectiveContext& ctx, const FilterParams& params) {
    validate(ctx);
    validate(params);

    const auto key = cache_key(params);
    if (const auto hit = ctx.cache.find(key); hit != ctx.cache.end())
        return hit->second;

    ++ctx.reconstructions;
    double sum = 0.0;
    for (std::size_t z = 0; z < ctx.sinograms.size(); ++z) {
        GrayImage slice = fbp(ctx.sinograms[z], params, ctx.reconstruction_size);
        if (ctx.quantize_float32)
            slice = slice.unaryExpr(
                [](double v) { return static_cast<double>(static_cast<float>(v)); });
        try {
            sum += pique_score(slice, ctx.pique_config);
        } catch (const input_error& e) {
            throw evaluation_error(
                "objective: slice " + std::to_string(z) + ": " + e.what(), BoState{});
        }
    }
    const double value = -sum / static_cast<double>(ctx.sinograms.size());
    ctx.cache.emplace(key, value);
    return value;
}

GridOracleResult
grid_scan(const std::function<double(const FilterParams&)>& objective, int coarse_m) {
    if (coarse_m < 2)
        throw input_error("grid oracle: needs at least a 2x2 grid");
    const GridDomain domain = GridDomain::make(coarse_m);

    GridOracleResult result;
    result.rho_axis = domain.rho_axis;
    result.omega_axis = domain.omega_axis;
    result.values = Eigen::MatrixXd::Constant(
        coarse_m, coarse_m, std::numeric_limits<double>::quiet_NaN());
    result.best_value = std::numeric_limits<double>::quiet_NaN();

    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < coarse_m; ++i)
        for (int j = 0; j < coarse_m; ++j) {
            FilterParams params;
            params.rho = domain.rho_axis[i];
            params.omega0 = domain.omega_axis[j];
            double value = 0.0;
            try {
                value = objective(params);
            } catch (const evaluation_error&) {
                return result; // abort, partial table stays
            }
            result.values(i, j) = value;
            if (value > best) {
                best = value;
                result.best = params;
                result.best_value = value;
            }
        }
    result.complete = true;
    return result;
}

GridOracleResult grid_oracle(const ObjectiveContext& ctx, int coarse_m) {
    return grid_scan(
        [&ctx](const FilterParams& params) { return objective_value(ctx, params); },
        coarse_m);
}

const char* schedule_name(BetaKind kind) {
    switch (kind) {
    case BetaKind::Constant:
        return "constant";
    case BetaKind::Increasing:
        return "increasing";
    case BetaKind::Decreasing:
        return "decreasing";
    }
    return "unknown";
}

TuningReport tune(const ObjectiveContext& ctx, const BoConfig& config,
                  const std::string& init_name) {
    const auto start = std::chrono::steady_clock::now();
    const BoReport bo = run_bo(config, [&ctx](const Point& x) {
        FilterParams params;
        params.rho = x[0];
        params.omega0 = x[1];
        return objective_value(ctx, params);
    });
    const auto stop = std::chrono::steady_clock::now();

    TuningReport report;
    report.best_params.rho = bo.best_site[0];
    report.best_params.omega0 = bo.best_site[1];
    report.best_objective = bo.best_value;
    report.best_pique = -bo.best_value;
    report.schedule = schedule_name(config.schedule.kind);
    report.init_name = init_name;
    report.wall_seconds = std::chrono::duration<double>(stop - start).count();

    const Eigen::Index total = bo.history.observed_values.size();
    const Eigen::Index inits = config.init_set.rows();
    report.trace.reserve(static_cast<std::size_t>(total));
    for (Eigen::Index t = 0; t < total; ++t) {
        TraceRow row;
        row.observation = static_cast<int>(t) + 1;
        row.rho = bo.history.observed_sites(t, 0);
        row.omega0 = bo.history.observed_sites(t, 1);
        row.objective = bo.history.observed_values[t];
        row.pique = -row.objective;
        row.from_init = t < inits;
        row.beta = row.from_init
                       ? 0.0
                       : bo.beta_trace[static_cast<std::size_t>(t - inits)];
        report.trace.push_back(row);
    }
    return report;
}

TuningReport tune(const ObjectiveContext& ctx, const BoConfig& config,
                  const GridOracleResult& oracle, const std::string& init_name) {
    TuningReport report = tune(ctx, config, init_name);

    Eigen::VectorXd observed(static_cast<Eigen::Index>(report.trace.size()));
    for (Eigen::Index t = 0; t < observed.size(); ++t)
        observed[t] = report.trace[static_cast<std::size_t>(t)].objective;
    // The coarse oracle can be beaten by an off-oracle-grid observation, so
    // regret is measured against the better of the two optima.
    const double optimum = std::isnan(oracle.best_value)
                               ? report.best_objective
                               : std::max(oracle.best_value, report.best_objective);
    auto [cumulative, curve] = regrets(observed, optimum);
    report.cumulative_regret = cumulative;
    report.simple_regret_curve = std::move(curve);
    report.has_regret = true;
    return report;
}

} // namespace spectune

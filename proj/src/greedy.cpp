#include "spectune/greedy.hpp"

#include <algorithm>
#include <cmath>

namespace spectune {

namespace {

Eigen::Index find_site(const Points& sites, const Point& x) {
    for (Eigen::Index i = 0; i < sites.rows(); ++i)
        if ((sites.row(i).transpose() - x).norm() == 0.0)
            return i;
    return -1;
}

Points rows_at(const Points& sites, const std::vector<Eigen::Index>& idx) {
    Points out(static_cast<Eigen::Index>(idx.size()), sites.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = sites.row(idx[i]);
    return out;
}

Interpolant fit_on_subset(const Kernel& kernel, const SampleSet& data,
                          const std::vector<Eigen::Index>& idx) {
    SampleSet subset;
    subset.sites = rows_at(data.sites, idx);
    subset.values.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        subset.values[static_cast<Eigen::Index>(i)] = data.values[idx[i]];
    return fit_interpolant(kernel, subset);
}

} // namespace

double greedy_indicator(GreedyCriterion criterion, const Kernel& kernel, const Points& selected,
                        const SampleSet& data, const Point& candidate) {
    if (criterion == GreedyCriterion::PGreedy)
        return power_function(kernel, selected, candidate);

    validate(data);
    if (find_site(data.sites, candidate) < 0)
        throw input_error("greedy_indicator: f-greedy candidate has no sampled value");
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(selected.rows()));
    for (Eigen::Index i = 0; i < selected.rows(); ++i) {
        const Eigen::Index at = find_site(data.sites, selected.row(i).transpose());
        if (at < 0)
            throw input_error("greedy_indicator: selected site has no sampled value");
        idx.push_back(at);
    }
    const Interpolant model = fit_on_subset(kernel, data, idx);
    const Eigen::Index c = find_site(data.sites, candidate);
    return std::abs(data.values[c] - eval_interpolant(model, candidate));
}

GreedyHistory run_greedy(GreedyCriterion criterion, const Kernel& kernel, const SampleSet& data,
                         int budget, const std::vector<Eigen::Index>& warm_start) {
    validate(data);
    const Eigen::Index n = data.sites.rows();
    if (budget < 1)
        throw input_error("run_greedy: budget must be positive");

    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> chosen; // warm start followed by history
    for (Eigen::Index w : warm_start) {
        if (w < 0 || w >= n)
            throw input_error("run_greedy: warm start index out of range");
        if (taken[static_cast<std::size_t>(w)])
            throw input_error("run_greedy: duplicate warm start index");
        taken[static_cast<std::size_t>(w)] = true;
        chosen.push_back(w);
    }
    if (static_cast<Eigen::Index>(warm_start.size()) + budget > n)
        throw input_error("run_greedy: budget exceeds available candidates");

    GreedyHistory history;
    history.selected = Points(budget, data.sites.cols());

    for (int step = 0; step < budget; ++step) {
        // Score every remaining candidate against the current selection. The
        // P-greedy branch compares squared power values and takes the square
        // root only for the recorded indicator, so the comparison order is the
        // same one the acquisition scan in bayes_opt sees.
        Eigen::VectorXd score(n);
        if (criterion == GreedyCriterion::PGreedy) {
            const double kqq = kernel.from_distance(0.0);
            if (chosen.empty()) {
                score.setConstant(kqq);
            } else {
                const Points sel = rows_at(data.sites, chosen);
                const detail::CholeskyFactor factor =
                    detail::factor_spd(kernel_matrix(kernel, sel), 0.0);
                Eigen::VectorXd kx(sel.rows());
                for (Eigen::Index c = 0; c < n; ++c) {
                    if (taken[static_cast<std::size_t>(c)]) {
                        score[c] = -1.0;
                        continue;
                    }
                    for (Eigen::Index i = 0; i < sel.rows(); ++i)
                        kx[i] = kernel.from_distance((sel.row(i) - data.sites.row(c)).norm());
                    score[c] = detail::power_squared_from_factor(factor, kx, kqq);
                }
            }
        } else {
            Interpolant model{kernel, Points(0, data.sites.cols()), Eigen::VectorXd(0)};
            if (!chosen.empty())
                model = fit_on_subset(kernel, data, chosen);
            for (Eigen::Index c = 0; c < n; ++c)
                score[c] =
                    std::abs(data.values[c] - eval_interpolant(model, data.sites.row(c).transpose()));
        }

        Eigen::Index best = -1;
        double best_value = -std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < n; ++c) {
            if (taken[static_cast<std::size_t>(c)])
                continue;
            if (score[c] > best_value) {
                best_value = score[c];
                best = c;
            }
        }

        taken[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
        history.selected_indices.push_back(best);
        history.selected.row(step) = data.sites.row(best);
        history.indicator_values.push_back(
            criterion == GreedyCriterion::PGreedy ? std::sqrt(best_value) : best_value);
        if (criterion == GreedyCriterion::FGreedy) {
            const Interpolant model = fit_on_subset(kernel, data, chosen);
            double worst = 0.0;
            for (Eigen::Index c = 0; c < n; ++c)
                worst = std::max(worst, std::abs(data.values[c] -
                                                 eval_interpolant(model, data.sites.row(c).transpose())));
            history.residual_max.push_back(worst);
        }
    }
    return history;
}

} // namespace spectune

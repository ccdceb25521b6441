#pragma once

#include "spectune/kernels.hpp"

#include <vector>

namespace spectune {

enum class GreedyCriterion { PGreedy, FGreedy };

struct GreedyHistory {
    std::vector<Eigen::Index> selected_indices; // into the candidate set, in selection order
    Points selected;                            // one selected point per row, same order
    std::vector<double> indicator_values;       // indicator of the winner at selection time
    std::vector<double> residual_max;           // FGreedy: max |f - fhat| over all sites per step
};

// Selection indicator for one candidate given the already selected sites.
// PGreedy scores the power function at the candidate; FGreedy scores the
// absolute residual of the interpolant built on the selected subset, so the
// candidate (and every selected site) must carry an f-value in `data`.
double greedy_indicator(GreedyCriterion criterion, const Kernel& kernel, const Points& selected,
                        const SampleSet& data, const Point& candidate);

// Greedy site selection over data.sites: at each step the unselected candidate
// with the largest indicator is appended, ties resolved toward the lowest
// candidate index. `warm_start` rows pre-populate the selected set without
// consuming budget or appearing in the history.
GreedyHistory run_greedy(GreedyCriterion criterion, const Kernel& kernel, const SampleSet& data,
                         int budget, const std::vector<Eigen::Index>& warm_start = {});

} // namespace spectune

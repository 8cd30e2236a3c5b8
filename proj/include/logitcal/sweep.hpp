#pragma once

#include <span>
#include <string>
#include <vector>

#include "logitcal/config.hpp"
#include "logitcal/records.hpp"

namespace logitcal {

struct SweepRow {
    double lambda = 0.0;
    int bins = 0;
    double ece = 0.0;
    double mean_auc = 0.0;  // over classes with at least one ground-truth positive
    std::string error;       // non-empty if this cell failed; metrics are NaN then
};

struct SweepOptions {
    int ece_bins = 10;
};

/// Fit on split.train, score split.test and evaluate, for every (lambda, bins) pair.
/// Rows are lambda-major in grid order. Cells run in parallel; a failing cell records
/// its error and the sweep continues.
std::vector<SweepRow> sweep(const DatasetSplit& split, std::span<const double> lambdas,
                            std::span<const int> bins_list, const ScoringConfig& base,
                            const SweepOptions& opts = {});

/// The same metrics for a single configuration, computed without any parallelism.
SweepRow evaluate_cell(const DatasetSplit& split, const ScoringConfig& cfg, int ece_bins);

}  // namespace logitcal

#pragma once

#include <cstdint>
#include <vector>

#include "logitcal/dump_io.hpp"

namespace logitcal {

/// Synthetic detector output with overconfident false positives.
///
/// A TP of class c draws logit c from N(tp_logit_means[c], noise_sigma) and every other
/// logit from N(off_target_mean, noise_sigma). An FP draws logit j from
/// N(fp_logit_means[j], noise_sigma) and then lifts one uniformly chosen logit by
/// fp_spurious_boost, which gives it a confident sigmoid score. Classes of TPs cycle
/// 0..K-1; difficulty tiers are drawn uniformly from easy/moderate/hard.
struct SyntheticSpec {
    int num_classes = 3;
    int n_tp = 2000;
    int n_fp = 2000;
    std::vector<double> tp_logit_means = {6.5, 6.5, 6.5};
    double off_target_mean = -2.0;
    std::vector<double> fp_logit_means = {1.5, 1.5, 1.5};
    double fp_spurious_boost = 1.0;
    double noise_sigma = 1.0;
    /// Objectness for every record; 1 models a detector without an objectness head.
    double objectness = 1.0;
    std::uint64_t seed = 42;

    /// Throws std::invalid_argument on negative counts, sigma <= 0 or mean vectors of
    /// the wrong length.
    void validate() const;
};

/// Deterministic for a given spec. Records are shuffled so TP/FP rows interleave.
DetectionDump generate_synthetic(const SyntheticSpec& spec);

}  // namespace logitcal

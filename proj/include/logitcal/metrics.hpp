#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logitcal/records.hpp"
#include "logitcal/scoring.hpp"

namespace logitcal {

// ---------------------------------------------------------------------------
// Expected calibration error
// ---------------------------------------------------------------------------

/// Bin m (1-based) covers ((m-1)/M, m/M]; a confidence of exactly 0 goes to bin 1.
struct ReliabilityBin {
    int index = 1;
    double lower = 0.0;
    double upper = 1.0;
    std::size_t count = 0;
    double accuracy = 0.0;    // 0 when empty
    double confidence = 0.0;  // 0 when empty
};

/// 1-based bin for a confidence in [0,1].
int ece_bin(double confidence, int num_bins);

std::vector<ReliabilityBin> reliability_bins(std::span<const double> confidences,
                                             const std::vector<bool>& correct, int num_bins);

/// sum_m |B_m|/n * |acc(B_m) - conf(B_m)|. Throws std::invalid_argument on n = 0 or
/// mismatched sizes, ValidationError on a confidence outside [0,1].
double ece(std::span<const double> confidences, const std::vector<bool>& correct, int num_bins);

double ece(std::span<const ScoredDetection> scored, int num_bins);

// ---------------------------------------------------------------------------
// Precision-recall
// ---------------------------------------------------------------------------

struct PrPoint {
    double threshold = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    double recall = 0.0;
    double precision = 0.0;
};

struct PrCurve {
    int class_index = 0;
    std::optional<Difficulty> difficulty;  // nullopt: all tiers
    std::size_t total_positives = 0;       // TP(class) records in the filtered set
    std::vector<PrPoint> points;           // one per distinct threshold, descending
    double auc = 0.0;
    std::string diagnostic;                // non-empty when no curve could be built

    bool empty() const { return points.empty(); }
};

/// Exact curve over every distinct confidence among detections predicted as
/// `class_index` (and in the difficulty tier, when given). A detection counts as TP
/// when its ground truth is TP of that class. Recall is relative to all TP records of
/// the class in the tier, including ones whose prediction went to another class.
PrCurve pr_curve(std::span<const ScoredDetection> scored, int class_index,
                 std::optional<Difficulty> difficulty = std::nullopt);

/// Trapezoidal area under precision(recall), with the first point's precision held
/// constant back to recall 0. Empty curves have area 0.
double auc(const PrCurve& curve);

// ---------------------------------------------------------------------------
// Score statistics
// ---------------------------------------------------------------------------

enum class Population { tp, fp };

struct ScoreStats {
    Population population = Population::tp;
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // population (N) denominator
};

/// nullopt when the population is empty.
std::optional<ScoreStats> score_stats(std::span<const ScoredDetection> scored, Population pop);

}  // namespace logitcal

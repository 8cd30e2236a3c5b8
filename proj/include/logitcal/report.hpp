#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "logitcal/dump_io.hpp"
#include "logitcal/metrics.hpp"
#include "logitcal/sweep.hpp"

namespace logitcal {

/// Scored detections rebuilt from one score column of a dump. class_scores stay empty.
std::vector<ScoredDetection> scored_from_dump(const DetectionDump& dump, const ScoreColumn& col);

/// Per-method evaluation: ECE with its reliability bins, one PR curve per
/// (class, tier) and TP/FP score statistics. Tiers are "all" plus every labeled tier
/// present in the data.
struct MethodEvaluation {
    std::string method;
    std::size_t count = 0;
    double ece = 0.0;
    std::vector<ReliabilityBin> reliability;
    std::vector<PrCurve> curves;
    std::optional<ScoreStats> tp_stats;
    std::optional<ScoreStats> fp_stats;
};

MethodEvaluation evaluate_method(const std::string& method, const std::vector<ScoredDetection>& scored,
                                 std::size_t num_classes, int ece_bins);

std::string tier_name(const std::optional<Difficulty>& d);

/// Writes ece.csv, reliability.csv, auc.csv, pr_curves.csv and score_stats.csv into
/// `dir` (created if needed). Contents are deterministic.
void write_report(const std::vector<MethodEvaluation>& evals, const std::filesystem::path& dir);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace logitcal

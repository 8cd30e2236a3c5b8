#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "logitcal/config.hpp"
#include "logitcal/density.hpp"
#include "logitcal/records.hpp"

namespace logitcal {

/// Every smoothed term of an ML/MAP layer is zero, so the normalization is 0/0.
class UndefinedScoreError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ScoredDetection {
    Match match;
    Difficulty difficulty = Difficulty::unknown;
    /// Per-class scores after the optional objectness multiplication. Empty when the
    /// detection was reconstructed from a scored dump, which stores only the confidence.
    std::vector<double> class_scores;
    int predicted_class = 0;
    double confidence = 0.0;

    /// TP whose class matches the prediction.
    bool correct() const { return match.is_tp() && match.true_class == predicted_class; }
};

/// Temperature-scaled softmax with max-subtraction.
std::vector<double> softmax_ts(std::span<const double> logits, double temperature);

/// Element-wise logistic function; saturates without overflow.
std::vector<double> sigmoid(std::span<const double> logits);

/// (L_i + lambda) / sum_k (L_k + lambda).
std::vector<double> ml_layer(std::span<const double> likelihood, double lambda);

/// (L_i * P_i + lambda) / sum_k (L_k * P_k + lambda).
std::vector<double> map_layer(std::span<const double> likelihood, std::span<const double> prior,
                              double lambda);

/// Scores one detection. `model` may be null for the sg and softmax methods.
ScoredDetection score_detection(const DetectionRecord& record, const DensityModel* model,
                                const ScoringConfig& cfg);

/// Batch scoring, parallel over records when built with OpenMP. Output order matches input.
std::vector<ScoredDetection> score_all(std::span<const DetectionRecord> records,
                                       const DensityModel* model, const ScoringConfig& cfg);

/// Single-threaded reference for score_all.
std::vector<ScoredDetection> score_all_serial(std::span<const DetectionRecord> records,
                                              const DensityModel* model, const ScoringConfig& cfg);

}  // namespace logitcal

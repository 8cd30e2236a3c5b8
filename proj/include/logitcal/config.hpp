#pragma once

#include <string>
#include <string_view>

namespace logitcal {

/// Prediction layer used to turn logits into class scores.
enum class Method { sg, softmax, ml, map };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

/// What plays the role of P(c) in the MAP layer.
enum class PriorMode {
    gaussian_density,  ///< class Gaussian evaluated at the test logit
    class_frequency,   ///< training count_c / N, constant per class
};

std::string_view to_string(PriorMode p);
PriorMode parse_prior_mode(std::string_view s);

struct ScoringConfig {
    Method method = Method::ml;
    double lambda = 0.0;       // additive smoothing
    int bins = 22;             // histogram bins for the likelihood
    double temperature = 1.0;  // softmax only
    bool use_objectness = true;
    PriorMode prior = PriorMode::gaussian_density;

    /// Throws std::invalid_argument when lambda < 0, bins < 1 or temperature <= 0.
    void validate() const;
};

}  // namespace logitcal

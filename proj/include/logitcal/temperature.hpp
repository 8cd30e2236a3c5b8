#pragma once

#include <span>

#include "logitcal/records.hpp"

namespace logitcal {

struct TemperatureFit {
    double temperature = 1.0;
    double nll = 0.0;
    std::size_t samples = 0;  // labeled records used
    bool at_boundary = false;  // optimum pinned to the search bracket
};

struct TemperatureSearch {
    double lower = 0.05;
    double upper = 20.0;
    double tolerance = 1e-4;  // bracket width in log-temperature
};

/// Negative log-likelihood of the true classes of all TP records under softmax_ts.
/// FP records carry no class label and are skipped.
double temperature_nll(std::span<const DetectionRecord> validation, double temperature);

/// Golden-section search on log(T) minimizing temperature_nll. Throws FitError when
/// there are no TP records.
TemperatureFit fit_temperature(std::span<const DetectionRecord> validation,
                               const TemperatureSearch& search = {});

}  // namespace logitcal

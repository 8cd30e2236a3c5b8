#include "logitcal/config.hpp"

#include <cmath>
#include <stdexcept>

namespace logitcal {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::sg: return "sg";
    case Method::softmax: return "softmax";
    case Method::ml: return "ml";
    case Method::map: return "map";
    }
    return "ml";
}

Method parse_method(std::string_view s) {
    if (s == "sg") return Method::sg;
    if (s == "softmax") return Method::softmax;
    if (s == "ml") return Method::ml;
    if (s == "map") return Method::map;
    throw std::invalid_argument("unknown method '" + std::string(s) + "' (sg, softmax, ml, map)");
}

std::string_view to_string(PriorMode p) {
    return p == PriorMode::gaussian_density ? "gaussian" : "frequency";
}

PriorMode parse_prior_mode(std::string_view s) {
    if (s == "gaussian") return PriorMode::gaussian_density;
    if (s == "frequency") return PriorMode::class_frequency;
    throw std::invalid_argument("unknown prior mode '" + std::string(s) + "' (gaussian, frequency)");
}

void ScoringConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be a finite value >= 0");
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw std::invalid_argument("temperature must be > 0");
}

}  // namespace logitcal

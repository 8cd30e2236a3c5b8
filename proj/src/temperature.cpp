#include "logitcal/temperature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "logitcal/density.hpp"

namespace logitcal {

double temperature_nll(std::span<const DetectionRecord> validation, double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
    double nll = 0.0;
    for (const auto& r : validation) {
        if (!r.match.is_tp()) continue;
        const auto& z = r.logits;
        double m = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp((v - m) / temperature);
        nll -= (z[static_cast<std::size_t>(r.match.true_class)] - m) / temperature - std::log(sum);
    }
    return nll;
}

TemperatureFit fit_temperature(std::span<const DetectionRecord> validation,
                               const TemperatureSearch& search) {
    auto labeled = static_cast<std::size_t>(
        std::count_if(validation.begin(), validation.end(), [](const auto& r) { return r.match.is_tp(); }));
    if (labeled == 0) throw FitError("temperature fit needs at least one TP record");
    if (!(search.lower > 0.0 && search.upper > search.lower))
        throw std::invalid_argument("invalid temperature bracket");

    auto f = [&](double log_t) { return temperature_nll(validation, std::exp(log_t)); };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(search.lower), b = std::log(search.upper);
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > search.tolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }

    TemperatureFit fit;
    double x = 0.5 * (a + b);
    fit.temperature = std::exp(x);
    fit.nll = f(x);
    fit.samples = labeled;
    fit.at_boundary = x - std::log(search.lower) < 2 * search.tolerance ||
                      std::log(search.upper) - x < 2 * search.tolerance;
    return fit;
}

}  // namespace logitcal

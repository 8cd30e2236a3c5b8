#include "logitcal/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "logitcal/parallel.hpp"

namespace logitcal {

std::vector<double> softmax_ts(std::span<const double> logits, double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
    if (logits.empty()) return {};
    double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp((logits[j] - m) / temperature);
        sum += out[j];
    }
    for (double& v : out) v /= sum;
    return out;
}

std::vector<double> sigmoid(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
        double z = logits[j];
        // exp of a non-positive argument only
        if (z >= 0.0) {
            out[j] = 1.0 / (1.0 + std::exp(-z));
        } else {
            double e = std::exp(z);
            out[j] = e / (1.0 + e);
        }
    }
    return out;
}

namespace {

std::vector<double> normalize_smoothed(std::vector<double> terms, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    double sum = 0.0;
    for (double& t : terms) {
        if (!(t >= 0.0)) throw std::invalid_argument("likelihood terms must be non-negative");
        t += lambda;
        sum += t;
    }
    if (!(sum > 0.0)) throw UndefinedScoreError("all smoothed class terms are zero");
    for (double& t : terms) t /= sum;
    return terms;
}

}  // namespace

std::vector<double> ml_layer(std::span<const double> likelihood, double lambda) {
    return normalize_smoothed({likelihood.begin(), likelihood.end()}, lambda);
}

std::vector<double> map_layer(std::span<const double> likelihood, std::span<const double> prior,
                              double lambda) {
    if (likelihood.size() != prior.size())
        throw std::invalid_argument("likelihood and prior sizes differ");
    std::vector<double> terms(likelihood.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = likelihood[i] * prior[i];
    return normalize_smoothed(std::move(terms), lambda);
}

ScoredDetection score_detection(const DetectionRecord& record, const DensityModel* model,
                                const ScoringConfig& cfg) {
    ScoredDetection out;
    out.match = record.match;
    out.difficulty = record.difficulty;

    std::size_t pred = 0;
    switch (cfg.method) {
    case Method::sg:
        out.class_scores = sigmoid(record.logits);
        pred = argmax(record.logits);
        break;
    case Method::softmax:
        out.class_scores = softmax_ts(record.logits, cfg.temperature);
        break;
    case Method::ml:
    case Method::map: {
        if (!model) throw std::invalid_argument("ml/map scoring needs a density model");
        auto like = lookup_likelihood(*model, record.logits);
        if (cfg.method == Method::ml) {
            out.class_scores = ml_layer(like, cfg.lambda);
        } else {
            auto prior = eval_prior(*model, record.logits, cfg.prior);
            out.class_scores = map_layer(like, prior, cfg.lambda);
        }
        break;
    }
    }

    if (cfg.use_objectness)
        for (double& s : out.class_scores) s *= record.objectness;
    if (cfg.method != Method::sg) pred = argmax(out.class_scores);
    out.predicted_class = static_cast<int>(pred);
    out.confidence = out.class_scores[pred];
    return out;
}

namespace {

void check_batch(std::span<const DetectionRecord> records, const DensityModel* model,
                 const ScoringConfig& cfg) {
    cfg.validate();
    if (cfg.method == Method::ml || cfg.method == Method::map) {
        if (!model) throw std::invalid_argument("ml/map scoring needs a density model");
        for (std::size_t i = 0; i < records.size(); ++i)
            if (records[i].logits.size() != model->num_classes)
                throw SchemaError("record " + std::to_string(i) + " has K=" +
                                  std::to_string(records[i].logits.size()) + ", model has K=" +
                                  std::to_string(model->num_classes));
    }
}

}  // namespace

std::vector<ScoredDetection> score_all(std::span<const DetectionRecord> records,
                                       const DensityModel* model, const ScoringConfig& cfg) {
    check_batch(records, model, cfg);
    std::vector<ScoredDetection> out(records.size());
    const auto n = static_cast<std::ptrdiff_t>(records.size());
    ErrorSlot err;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        err.run(i, [&] { out[i] = score_detection(records[i], model, cfg); });
    }
    err.rethrow();
    return out;
}

std::vector<ScoredDetection> score_all_serial(std::span<const DetectionRecord> records,
                                              const DensityModel* model, const ScoringConfig& cfg) {
    check_batch(records, model, cfg);
    std::vector<ScoredDetection> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(score_detection(r, model, cfg));
    return out;
}

}  // namespace logitcal

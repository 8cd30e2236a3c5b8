#include "logitcal/density.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include <json.hpp>

namespace logitcal {

using nlohmann::json;

long ClassHistogram::bin_of(double x) const {
    if (freq.empty() || !(x >= lower()) || x > upper()) return -1;
    if (x == upper()) return static_cast<long>(bins()) - 1;
    auto it = std::upper_bound(bin_low.begin(), bin_low.end(), x);
    return static_cast<long>(it - bin_low.begin()) - 1;
}

double GaussianPrior::pdf(double x) const {
    double d = x - mu;
    return std::exp(-0.5 * d * d / sigma2) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

void DensityModel::check() const {
    if (histograms.size() != num_classes || priors.size() != num_classes ||
        class_counts.size() != num_classes)
        throw FitError("density model must hold one histogram and one prior per class");
    for (std::size_t c = 0; c < num_classes; ++c) {
        const auto& h = histograms[c];
        if (h.freq.empty() || h.bin_low.size() != h.freq.size() || h.bin_high.size() != h.freq.size())
            throw FitError("histogram " + std::to_string(c) + " is malformed");
        if (!(priors[c].sigma2 > 0.0)) throw FitError("prior " + std::to_string(c) + " has sigma2 <= 0");
    }
}

ClassHistogram fit_histogram(std::span<const double> values, int bins, int class_index) {
    if (values.empty()) throw FitError("cannot fit a histogram on no values");
    if (bins < 1) throw FitError("bins must be >= 1");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw FitError("non-finite training value");
    if (lo == hi) {
        double pad = 1e-6 * std::max(1.0, std::abs(lo));
        lo -= pad;
        hi += pad;
    }

    ClassHistogram h;
    h.class_index = class_index;
    auto n = static_cast<std::size_t>(bins);
    h.bin_low.resize(n);
    h.bin_high.resize(n);
    double width = (hi - lo) / bins;
    for (std::size_t i = 0; i < n; ++i) h.bin_low[i] = lo + static_cast<double>(i) * width;
    for (std::size_t i = 0; i + 1 < n; ++i) h.bin_high[i] = h.bin_low[i + 1];
    h.bin_high[n - 1] = hi;

    std::vector<std::size_t> counts(n, 0);
    h.freq.assign(n, 0.0);
    for (double v : values) ++counts[static_cast<std::size_t>(h.bin_of(v))];
    auto total = static_cast<double>(values.size());
    for (std::size_t i = 0; i < n; ++i) h.freq[i] = static_cast<double>(counts[i]) / total;
    return h;
}

GaussianPrior fit_prior(std::span<const double> values, int class_index) {
    if (values.size() < 2) throw FitError("prior needs at least 2 values");
    double sum = 0.0;
    for (double v : values) sum += v;
    double mu = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    double sigma2 = ss / static_cast<double>(values.size() - 1);
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw FitError("prior needs at least 2 distinct values (zero variance)");
    return {class_index, mu, sigma2};
}

DensityModel fit_model(const std::vector<TrainingRecord>& train, int bins) {
    if (train.empty()) throw FitError("no training records");
    std::size_t k = train.front().logits.size();
    std::vector<std::vector<double>> per_class(k);
    for (const auto& r : train) {
        if (r.logits.size() != k) throw SchemaError("training records disagree on K");
        validate(r);
        per_class[static_cast<std::size_t>(r.true_class)].push_back(
            r.logits[static_cast<std::size_t>(r.true_class)]);
    }

    DensityModel model;
    model.num_classes = k;
    model.bins = bins;
    for (std::size_t c = 0; c < k; ++c) {
        const auto& vals = per_class[c];
        auto ci = static_cast<int>(c);
        if (vals.size() < 2)
            throw FitError("class " + std::to_string(c) + " has " + std::to_string(vals.size()) +
                           " training records (need >= 2)");
        try {
            model.histograms.push_back(fit_histogram(vals, bins, ci));
            model.priors.push_back(fit_prior(vals, ci));
        } catch (const FitError& e) {
            throw FitError("class " + std::to_string(c) + ": " + e.what());
        }
        model.class_counts.push_back(vals.size());
    }
    return model;
}

std::vector<double> lookup_likelihood(const DensityModel& model, std::span<const double> logits) {
    if (logits.size() != model.num_classes)
        throw SchemaError("record has K=" + std::to_string(logits.size()) + ", model has K=" +
                          std::to_string(model.num_classes));
    std::vector<double> out(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) out[c] = model.histograms[c].density_at(logits[c]);
    return out;
}

std::vector<double> eval_prior(const DensityModel& model, std::span<const double> logits,
                               PriorMode mode) {
    if (logits.size() != model.num_classes)
        throw SchemaError("record has K=" + std::to_string(logits.size()) + ", model has K=" +
                          std::to_string(model.num_classes));
    std::vector<double> out(logits.size());
    if (mode == PriorMode::class_frequency) {
        double total = 0.0;
        for (auto n : model.class_counts) total += static_cast<double>(n);
        for (std::size_t c = 0; c < out.size(); ++c)
            out[c] = static_cast<double>(model.class_counts[c]) / total;
    } else {
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = model.priors[c].pdf(logits[c]);
    }
    return out;
}

void write_model(std::ostream& out, const DensityModel& model) {
    model.check();
    json classes = json::array();
    for (std::size_t c = 0; c < model.num_classes; ++c) {
        const auto& h = model.histograms[c];
        std::vector<double> edges = h.bin_low;
        edges.push_back(h.bin_high.back());
        classes.push_back(json{{"class_index", h.class_index},
                               {"count", model.class_counts[c]},
                               {"edges", edges},
                               {"freq", h.freq},
                               {"mu", model.priors[c].mu},
                               {"sigma2", model.priors[c].sigma2}});
    }
    json doc{{"format", "logitcal-density"},
             {"version", kModelVersion},
             {"num_classes", model.num_classes},
             {"bins", model.bins},
             {"classes", std::move(classes)}};
    out << doc.dump(2) << '\n';
}

DensityModel read_model(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FitError(std::string("model file: ") + e.what());
    }
    if (doc.value("format", "") != "logitcal-density") throw FitError("not a logitcal density model");
    if (doc.value("version", 0) != kModelVersion)
        throw FitError("unsupported model version " + doc.value("version", json(0)).dump());

    DensityModel m;
    try {
        m.num_classes = doc.at("num_classes").get<std::size_t>();
        m.bins = doc.at("bins").get<int>();
        for (const auto& c : doc.at("classes")) {
            ClassHistogram h;
            h.class_index = c.at("class_index").get<int>();
            auto edges = c.at("edges").get<std::vector<double>>();
            h.freq = c.at("freq").get<std::vector<double>>();
            if (edges.size() != h.freq.size() + 1) throw FitError("edges/freq size mismatch");
            h.bin_low.assign(edges.begin(), edges.end() - 1);
            h.bin_high.assign(edges.begin() + 1, edges.end());
            m.histograms.push_back(std::move(h));
            m.priors.push_back({c.at("class_index").get<int>(), c.at("mu").get<double>(),
                                c.at("sigma2").get<double>()});
            m.class_counts.push_back(c.at("count").get<std::size_t>());
        }
    } catch (const json::exception& e) {
        throw FitError(std::string("model file: ") + e.what());
    }
    m.check();
    return m;
}

}  // namespace logitcal

#include "logitcal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace logitcal {

int ece_bin(double confidence, int num_bins) {
    if (num_bins < 1) throw std::invalid_argument("ECE needs at least one bin");
    if (!(confidence >= 0.0 && confidence <= 1.0))
        throw ValidationError("confidence " + std::to_string(confidence) + " outside [0,1]");
    const double m_bins = num_bins;
    int m = static_cast<int>(std::ceil(confidence * m_bins));
    m = std::clamp(m, 1, num_bins);
    // confidence * M can round across an edge; settle against the edges themselves.
    while (m > 1 && confidence <= (m - 1) / m_bins) --m;
    while (m < num_bins && confidence > m / m_bins) ++m;
    return m;
}

std::vector<ReliabilityBin> reliability_bins(std::span<const double> confidences,
                                             const std::vector<bool>& correct, int num_bins) {
    if (confidences.size() != correct.size())
        throw std::invalid_argument("confidences and correctness flags differ in length");
    if (num_bins < 1) throw std::invalid_argument("ECE needs at least one bin");

    std::vector<ReliabilityBin> bins(static_cast<std::size_t>(num_bins));
    std::vector<double> conf_sum(bins.size(), 0.0);
    std::vector<std::size_t> hits(bins.size(), 0);
    for (std::size_t i = 0; i < confidences.size(); ++i) {
        auto b = static_cast<std::size_t>(ece_bin(confidences[i], num_bins) - 1);
        ++bins[b].count;
        conf_sum[b] += confidences[i];
        if (correct[i]) ++hits[b];
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
        auto& bin = bins[b];
        bin.index = static_cast<int>(b) + 1;
        bin.lower = static_cast<double>(b) / num_bins;
        bin.upper = static_cast<double>(b + 1) / num_bins;
        if (bin.count > 0) {
            bin.accuracy = static_cast<double>(hits[b]) / static_cast<double>(bin.count);
            bin.confidence = conf_sum[b] / static_cast<double>(bin.count);
        }
    }
    return bins;
}

double ece(std::span<const double> confidences, const std::vector<bool>& correct, int num_bins) {
    if (confidences.empty()) throw std::invalid_argument("ECE of an empty set");
    auto bins = reliability_bins(confidences, correct, num_bins);
    const auto n = static_cast<double>(confidences.size());
    double total = 0.0;
    for (const auto& b : bins)
        if (b.count > 0) total += static_cast<double>(b.count) / n * std::abs(b.accuracy - b.confidence);
    return total;
}

double ece(std::span<const ScoredDetection> scored, int num_bins) {
    std::vector<double> conf;
    std::vector<bool> correct;
    conf.reserve(scored.size());
    correct.reserve(scored.size());
    for (const auto& s : scored) {
        conf.push_back(s.confidence);
        correct.push_back(s.correct());
    }
    return ece(conf, correct, num_bins);
}

PrCurve pr_curve(std::span<const ScoredDetection> scored, int class_index,
                 std::optional<Difficulty> difficulty) {
    PrCurve curve;
    curve.class_index = class_index;
    curve.difficulty = difficulty;

    std::vector<double> pos, neg;  // confidences of candidate TPs / FPs
    std::size_t in_tier = 0;
    for (const auto& s : scored) {
        if (difficulty && s.difficulty != *difficulty) continue;
        ++in_tier;
        bool is_pos = s.match.is_tp() && s.match.true_class == class_index;
        if (is_pos) ++curve.total_positives;
        if (s.predicted_class != class_index) continue;
        (is_pos ? pos : neg).push_back(s.confidence);
    }
    if (in_tier == 0) {
        curve.diagnostic = "no detections in the selected tier";
        return curve;
    }
    if (curve.total_positives == 0) {
        curve.diagnostic = "no ground-truth positives for class " + std::to_string(class_index);
        return curve;
    }

    std::sort(pos.begin(), pos.end(), std::greater<>());
    std::sort(neg.begin(), neg.end(), std::greater<>());
    std::size_t ip = 0, in = 0;
    const auto total = static_cast<double>(curve.total_positives);
    while (ip < pos.size() || in < neg.size()) {
        double t = ip < pos.size() ? pos[ip] : neg[in];
        if (in < neg.size() && neg[in] > t) t = neg[in];
        while (ip < pos.size() && pos[ip] == t) ++ip;
        while (in < neg.size() && neg[in] == t) ++in;
        PrPoint p;
        p.threshold = t;
        p.tp = ip;
        p.fp = in;
        p.recall = static_cast<double>(ip) / total;
        p.precision = static_cast<double>(ip) / static_cast<double>(ip + in);
        curve.points.push_back(p);
    }
    if (curve.points.empty()) curve.diagnostic = "no detections predicted as class " + std::to_string(class_index);
    curve.auc = auc(curve);
    return curve;
}

double auc(const PrCurve& curve) {
    const auto& pts = curve.points;
    if (pts.empty()) return 0.0;
    double area = pts.front().precision * pts.front().recall;
    for (std::size_t i = 1; i < pts.size(); ++i)
        area += (pts[i].recall - pts[i - 1].recall) * 0.5 * (pts[i].precision + pts[i - 1].precision);
    return area;
}

std::optional<ScoreStats> score_stats(std::span<const ScoredDetection> scored, Population pop) {
    std::vector<double> v;
    for (const auto& s : scored)
        if (s.match.is_tp() == (pop == Population::tp)) v.push_back(s.confidence);
    if (v.empty()) return std::nullopt;
    ScoreStats st;
    st.population = pop;
    st.count = v.size();
    const auto n = static_cast<double>(v.size());
    st.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - st.mean) * (x - st.mean);
    st.variance = ss / n;
    return st;
}

}  // namespace logitcal

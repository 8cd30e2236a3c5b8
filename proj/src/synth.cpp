#include "logitcal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace logitcal {

void SyntheticSpec::validate() const {
    if (num_classes < 2) throw std::invalid_argument("synthetic spec needs K >= 2");
    if (n_tp < 0 || n_fp < 0) throw std::invalid_argument("record counts must be >= 0");
    if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma))
        throw std::invalid_argument("noise sigma must be > 0");
    if (tp_logit_means.size() != static_cast<std::size_t>(num_classes) ||
        fp_logit_means.size() != static_cast<std::size_t>(num_classes))
        throw std::invalid_argument("TP/FP mean vectors must have K entries");
    if (!(objectness >= 0.0 && objectness <= 1.0))
        throw std::invalid_argument("objectness must be in [0,1]");
}

DetectionDump generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const auto k = static_cast<std::size_t>(spec.num_classes);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    std::uniform_int_distribution<int> pick_class(0, spec.num_classes - 1);
    std::uniform_int_distribution<int> pick_tier(0, 2);
    const Difficulty tiers[] = {Difficulty::easy, Difficulty::moderate, Difficulty::hard};

    DetectionDump dump;
    dump.num_classes = k;
    dump.records.reserve(static_cast<std::size_t>(spec.n_tp + spec.n_fp));

    for (int i = 0; i < spec.n_tp; ++i) {
        DetectionRecord r;
        int c = i % spec.num_classes;
        r.logits.resize(k);
        for (std::size_t j = 0; j < k; ++j)
            r.logits[j] = (static_cast<int>(j) == c ? spec.tp_logit_means[j] : spec.off_target_mean) + noise(rng);
        r.objectness = spec.objectness;
        r.match = Match::tp(c);
        r.difficulty = tiers[pick_tier(rng)];
        dump.records.push_back(std::move(r));
    }
    for (int i = 0; i < spec.n_fp; ++i) {
        DetectionRecord r;
        r.logits.resize(k);
        for (std::size_t j = 0; j < k; ++j) r.logits[j] = spec.fp_logit_means[j] + noise(rng);
        r.logits[static_cast<std::size_t>(pick_class(rng))] += spec.fp_spurious_boost;
        r.objectness = spec.objectness;
        r.match = Match::fp();
        r.difficulty = tiers[pick_tier(rng)];
        dump.records.push_back(std::move(r));
    }

    std::shuffle(dump.records.begin(), dump.records.end(), rng);
    for (std::size_t i = 0; i < dump.records.size(); ++i) {
        auto& r = dump.records[i];
        r.frame_id = "synth_" + std::to_string(i / 8);
        r.det_id = static_cast<long long>(i);
    }
    return dump;
}

}  // namespace logitcal

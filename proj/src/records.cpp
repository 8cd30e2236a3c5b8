#include "logitcal/records.hpp"

#include <charconv>
#include <cmath>
#include <map>

namespace logitcal {

std::string_view to_string(Difficulty d) {
    switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::moderate: return "moderate";
    case Difficulty::hard: return "hard";
    case Difficulty::unknown: return "unknown";
    }
    return "unknown";
}

Difficulty parse_difficulty(std::string_view s) {
    if (s == "easy") return Difficulty::easy;
    if (s == "moderate") return Difficulty::moderate;
    if (s == "hard") return Difficulty::hard;
    if (s == "unknown" || s.empty()) return Difficulty::unknown;
    throw ValidationError("unknown difficulty '" + std::string(s) + "'");
}

std::string to_string(Match m) {
    return m.is_tp() ? "TP:" + std::to_string(m.true_class) : std::string("FP");
}

Match parse_match(std::string_view s) {
    if (s == "FP") return Match::fp();
    if (s.starts_with("TP:")) {
        auto digits = s.substr(3);
        int c = -1;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), c);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && c >= 0)
            return Match::tp(c);
    }
    throw ValidationError("bad match label '" + std::string(s) + "' (expected TP:<class> or FP)");
}

namespace {

void check_logits(const std::vector<double>& logits) {
    if (logits.size() < 2)
        throw ValidationError("need at least 2 logits, got " + std::to_string(logits.size()));
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (!std::isfinite(logits[i]))
            throw ValidationError("non-finite logit at index " + std::to_string(i));
}

}  // namespace

void validate(const DetectionRecord& r) {
    check_logits(r.logits);
    if (!(r.objectness >= 0.0 && r.objectness <= 1.0))
        throw ValidationError("objectness " + std::to_string(r.objectness) + " outside [0,1]");
    if (r.match.is_tp() && static_cast<std::size_t>(r.match.true_class) >= r.logits.size())
        throw ValidationError("TP class " + std::to_string(r.match.true_class) +
                              " out of range for K=" + std::to_string(r.logits.size()));
}

void validate(const TrainingRecord& r) {
    check_logits(r.logits);
    if (r.true_class < 0 || static_cast<std::size_t>(r.true_class) >= r.logits.size())
        throw ValidationError("true class " + std::to_string(r.true_class) + " out of range");
}

std::vector<TrainingRecord> training_from_detections(const std::vector<DetectionRecord>& dets) {
    std::vector<TrainingRecord> out;
    for (const auto& d : dets)
        if (d.match.is_tp()) out.push_back({d.logits, d.match.true_class});
    return out;
}

std::vector<Diagnostic> validate_split(const DatasetSplit& split, int bins) {
    std::vector<Diagnostic> diags;
    std::optional<std::size_t> k;
    auto check_k = [&](std::size_t n, const char* set, std::size_t idx) {
        if (!k) {
            k = n;
        } else if (*k != n) {
            diags.push_back({Severity::error, std::string(set) + " record " + std::to_string(idx) +
                                                  " has K=" + std::to_string(n) + ", expected " +
                                                  std::to_string(*k)});
        }
    };
    auto check = [&](const auto& rec, const char* set, std::size_t idx) {
        check_k(rec.logits.size(), set, idx);
        try {
            validate(rec);
        } catch (const ValidationError& e) {
            diags.push_back({Severity::error, std::string(set) + " record " + std::to_string(idx) +
                                                  ": " + e.what()});
        }
    };

    std::map<int, std::size_t> per_class;
    for (std::size_t i = 0; i < split.train.size(); ++i) {
        check(split.train[i], "train", i);
        ++per_class[split.train[i].true_class];
    }
    for (std::size_t i = 0; i < split.validation.size(); ++i) check(split.validation[i], "validation", i);
    for (std::size_t i = 0; i < split.test.size(); ++i) check(split.test[i], "test", i);

    if (k) {
        for (std::size_t c = 0; c < *k; ++c) {
            auto n = per_class.count(static_cast<int>(c)) ? per_class[static_cast<int>(c)] : 0;
            if (n < static_cast<std::size_t>(bins))
                diags.push_back({Severity::warning, "sparse class " + std::to_string(c) + ": " +
                                                        std::to_string(n) + " training records for " +
                                                        std::to_string(bins) + " bins"});
        }
    }
    return diags;
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace logitcal

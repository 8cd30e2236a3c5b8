#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace logitcal {

/// Error raised when an input violates a record/schema invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Records in one file disagree on the number of classes.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Difficulty { easy, moderate, hard, unknown };

std::string_view to_string(Difficulty d);
Difficulty parse_difficulty(std::string_view s);

/// Ground-truth match of a detection: a true positive of some class, or a false positive.
struct Match {
    static constexpr int kFalsePositive = -1;
    int true_class = kFalsePositive;

    static Match tp(int c) { return Match{c}; }
    static Match fp() { return Match{}; }
    bool is_tp() const { return true_class >= 0; }
    bool operator==(const Match&) const = default;
};

std::string to_string(Match m);
Match parse_match(std::string_view s);

struct DetectionRecord {
    std::string frame_id;
    long long det_id = 0;
    std::vector<double> logits;
    double objectness = 1.0;
    Match match;
    Difficulty difficulty = Difficulty::unknown;

    std::size_t num_classes() const { return logits.size(); }
};

struct TrainingRecord {
    std::vector<double> logits;
    int true_class = 0;
};

struct DatasetSplit {
    std::vector<TrainingRecord> train;
    std::vector<DetectionRecord> validation;
    std::vector<DetectionRecord> test;
};

/// Throws ValidationError if the record breaks an invariant (K >= 2, finite logits,
/// objectness in [0,1], TP class in range).
void validate(const DetectionRecord& r);
void validate(const TrainingRecord& r);

/// Training records from the true positives of a detection list.
std::vector<TrainingRecord> training_from_detections(const std::vector<DetectionRecord>& dets);

enum class Severity { warning, error };

struct Diagnostic {
    Severity severity;
    std::string message;
};

/// Checks every invariant of a split and, given a histogram bin count, flags classes
/// with fewer training records than bins.
std::vector<Diagnostic> validate_split(const DatasetSplit& split, int bins);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const std::vector<double>& v);

}  // namespace logitcal

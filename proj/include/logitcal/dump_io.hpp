#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "logitcal/records.hpp"

namespace logitcal {

enum class DumpFormat { csv, jsonl };

/// `.jsonl`/`.ndjson` map to jsonl, everything else to csv.
DumpFormat format_from_path(const std::filesystem::path& p);
DumpFormat parse_dump_format(std::string_view s);

inline constexpr int kDumpVersion = 1;

/// Per-method score columns appended by `score` (score_<method>, pred_class_<method>).
struct ScoreColumn {
    std::string method;
    std::vector<double> score;
    std::vector<int> pred_class;
};

/// A detection dump as it sits on disk: records plus any score columns.
struct DetectionDump {
    std::size_t num_classes = 0;
    std::vector<DetectionRecord> records;
    std::vector<ScoreColumn> scores;

    const ScoreColumn* find_scores(std::string_view method) const;
    /// Adds or replaces the column for `col.method`.
    void set_scores(ScoreColumn col);
};

// CSV layout (one detection per row):
//
//   #logitcal-dump,version=1
//   frame_id,det_id,logit_0,...,logit_{K-1},objectness,match,difficulty[,score_<m>,pred_class_<m>]...
//
// The version line is optional on input. frame_id, det_id, objectness and difficulty are
// optional columns (defaults: "", row index, 1.0, unknown). match is TP:<class> or FP.
// Training dumps use the same logit columns plus either true_class or match; with match,
// FP rows are skipped.
//
// JSON-lines layout: a header object {"format":"logitcal-dump","version":1,"num_classes":K}
// followed by one object per record.

DetectionDump read_detections(std::istream& in, DumpFormat fmt);
void write_detections(std::ostream& out, const DetectionDump& dump, DumpFormat fmt);

std::vector<TrainingRecord> read_training(std::istream& in, DumpFormat fmt);
void write_training(std::ostream& out, const std::vector<TrainingRecord>& recs, DumpFormat fmt);

DetectionDump load_detections(const std::filesystem::path& p);
DetectionDump load_detections(const std::filesystem::path& p, DumpFormat fmt);
std::vector<TrainingRecord> load_training(const std::filesystem::path& p);
void save_detections(const std::filesystem::path& p, const DetectionDump& dump);
void save_training(const std::filesystem::path& p, const std::vector<TrainingRecord>& recs);

/// Loads a split from up to three files; validation may be empty.
DatasetSplit load_split(const std::filesystem::path& train,
                        const std::filesystem::path& validation,
                        const std::filesystem::path& test);

/// Shortest round-trippable text at 9 significant digits.
std::string format_real(double v);

}  // namespace logitcal

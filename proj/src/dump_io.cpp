#include "logitcal/dump_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace logitcal {

using nlohmann::json;

DumpFormat format_from_path(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return DumpFormat::jsonl;
    return DumpFormat::csv;
}

DumpFormat parse_dump_format(std::string_view s) {
    if (s == "csv") return DumpFormat::csv;
    if (s == "jsonl") return DumpFormat::jsonl;
    throw std::invalid_argument("unknown dump format '" + std::string(s) + "'");
}

const ScoreColumn* DetectionDump::find_scores(std::string_view method) const {
    for (const auto& c : scores)
        if (c.method == method) return &c;
    return nullptr;
}

void DetectionDump::set_scores(ScoreColumn col) {
    for (auto& c : scores) {
        if (c.method == col.method) {
            c = std::move(col);
            return;
        }
    }
    scores.push_back(std::move(col));
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, ptr);
}

namespace {

constexpr std::string_view kCsvMagic = "#logitcal-dump";

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

double parse_real(std::string_view s, std::size_t line, std::string_view column) {
    double v = 0.0;
    auto first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, "column " + std::string(column) + ": '" + std::string(s) +
                                   "' is not a number");
    return v;
}

long long parse_integer(std::string_view s, std::size_t line, std::string_view column) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, "column " + std::string(column) + ": '" + std::string(s) +
                                   "' is not an integer");
    return v;
}

// Column roles resolved from a CSV header.
struct CsvLayout {
    std::vector<std::size_t> logit_cols;
    std::optional<std::size_t> frame_id, det_id, objectness, match, difficulty, true_class;
    struct ScoreCols {
        std::string method;
        std::size_t score;
        std::optional<std::size_t> pred;
    };
    std::vector<ScoreCols> score_cols;
    std::size_t width = 0;
};

CsvLayout parse_header(std::string_view header, std::size_t line_no) {
    CsvLayout layout;
    auto cols = split_csv(header);
    layout.width = cols.size();
    std::map<int, std::size_t> logits;
    std::map<std::string, std::size_t> preds;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        auto name = cols[i];
        if (name.starts_with("logit_")) {
            auto idx = parse_integer(name.substr(6), line_no, name);
            if (!logits.emplace(static_cast<int>(idx), i).second)
                throw ParseError(line_no, "duplicate column " + std::string(name));
        } else if (name == "frame_id") {
            layout.frame_id = i;
        } else if (name == "det_id") {
            layout.det_id = i;
        } else if (name == "objectness") {
            layout.objectness = i;
        } else if (name == "match") {
            layout.match = i;
        } else if (name == "difficulty") {
            layout.difficulty = i;
        } else if (name == "true_class") {
            layout.true_class = i;
        } else if (name.starts_with("score_")) {
            layout.score_cols.push_back({std::string(name.substr(6)), i, std::nullopt});
        } else if (name.starts_with("pred_class_")) {
            preds[std::string(name.substr(11))] = i;
        } else {
            throw ParseError(line_no, "unknown column '" + std::string(name) + "'");
        }
    }
    int expect = 0;
    for (auto [idx, col] : logits) {
        if (idx != expect++)
            throw SchemaError("logit columns must be logit_0..logit_{K-1} without gaps");
        layout.logit_cols.push_back(col);
    }
    if (layout.logit_cols.size() < 2) throw SchemaError("header declares fewer than 2 logit columns");
    for (auto& sc : layout.score_cols) {
        auto it = preds.find(sc.method);
        if (it != preds.end()) sc.pred = it->second;
    }
    return layout;
}

// Reads the optional version line and the header; returns the layout and the line number.
CsvLayout read_csv_preamble(std::istream& in, std::size_t& line_no) {
    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.starts_with(kCsvMagic)) {
            auto pos = line.find("version=");
            if (pos == std::string::npos) throw ParseError(line_no, "version line without version=");
            auto v = parse_integer(std::string_view(line).substr(pos + 8), line_no, "version");
            if (v != kDumpVersion)
                throw SchemaError("unsupported dump version " + std::to_string(v));
            continue;
        }
        return parse_header(line, line_no);
    }
    throw ParseError(line_no, "missing header");
}

template <class Rec>
void rethrow_with_line(std::size_t line_no, const Rec& rec) {
    try {
        validate(rec);
    } catch (const ValidationError& e) {
        throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
}

DetectionDump read_detections_csv(std::istream& in) {
    std::size_t line_no = 0;
    auto layout = read_csv_preamble(in, line_no);
    if (!layout.match) throw SchemaError("detection dump needs a match column");

    DetectionDump dump;
    dump.num_classes = layout.logit_cols.size();
    for (const auto& sc : layout.score_cols) dump.scores.push_back({sc.method, {}, {}});

    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != layout.width)
            throw ParseError(line_no, "expected " + std::to_string(layout.width) + " fields, got " +
                                          std::to_string(f.size()));
        DetectionRecord r;
        if (layout.frame_id) r.frame_id = std::string(f[*layout.frame_id]);
        r.det_id = layout.det_id ? parse_integer(f[*layout.det_id], line_no, "det_id")
                                 : static_cast<long long>(dump.records.size());
        r.logits.reserve(layout.logit_cols.size());
        for (std::size_t k = 0; k < layout.logit_cols.size(); ++k)
            r.logits.push_back(parse_real(f[layout.logit_cols[k]], line_no, "logit"));
        if (layout.objectness) r.objectness = parse_real(f[*layout.objectness], line_no, "objectness");
        try {
            r.match = parse_match(f[*layout.match]);
            if (layout.difficulty) r.difficulty = parse_difficulty(f[*layout.difficulty]);
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
        rethrow_with_line(line_no, r);
        for (std::size_t s = 0; s < layout.score_cols.size(); ++s) {
            const auto& sc = layout.score_cols[s];
            dump.scores[s].score.push_back(parse_real(f[sc.score], line_no, "score_" + sc.method));
            dump.scores[s].pred_class.push_back(
                sc.pred ? static_cast<int>(parse_integer(f[*sc.pred], line_no, "pred_class")) : -1);
        }
        dump.records.push_back(std::move(r));
    }
    return dump;
}

void check_frame_id(const std::string& id) {
    if (id.find_first_of(",\n\r\"") != std::string::npos)
        throw ValidationError("frame_id '" + id + "' contains a CSV delimiter");
}

void write_detections_csv(std::ostream& out, const DetectionDump& dump) {
    out << kCsvMagic << ",version=" << kDumpVersion << '\n';
    out << "frame_id,det_id";
    for (std::size_t k = 0; k < dump.num_classes; ++k) out << ",logit_" << k;
    out << ",objectness,match,difficulty";
    for (const auto& s : dump.scores) out << ",score_" << s.method << ",pred_class_" << s.method;
    out << '\n';
    for (std::size_t i = 0; i < dump.records.size(); ++i) {
        const auto& r = dump.records[i];
        check_frame_id(r.frame_id);
        out << r.frame_id << ',' << r.det_id;
        for (double v : r.logits) out << ',' << format_real(v);
        out << ',' << format_real(r.objectness) << ',' << to_string(r.match) << ','
            << to_string(r.difficulty);
        for (const auto& s : dump.scores)
            out << ',' << format_real(s.score.at(i)) << ',' << s.pred_class.at(i);
        out << '\n';
    }
}

json header_json(std::size_t k, const char* kind) {
    return json{{"format", "logitcal-dump"}, {"kind", kind}, {"version", kDumpVersion},
                {"num_classes", k}};
}

std::size_t read_jsonl_header(std::istream& in, std::size_t& line_no, const char* kind) {
    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json h;
        try {
            h = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        if (!h.is_object() || h.value("format", "") != "logitcal-dump")
            throw ParseError(line_no, "missing logitcal-dump header object");
        if (h.value("version", 0) != kDumpVersion)
            throw SchemaError("unsupported dump version " + h.value("version", json(0)).dump());
        if (h.contains("kind") && h["kind"] != kind)
            throw SchemaError("expected a " + std::string(kind) + " dump, found " +
                              h["kind"].get<std::string>());
        auto k = h.value("num_classes", std::size_t{0});
        if (k < 2) throw SchemaError("header declares fewer than 2 classes");
        return k;
    }
    throw ParseError(line_no, "missing header");
}

DetectionDump read_detections_jsonl(std::istream& in) {
    std::size_t line_no = 0;
    DetectionDump dump;
    dump.num_classes = read_jsonl_header(in, line_no, "detections");
    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        DetectionRecord r;
        json j;
        try {
            j = json::parse(line);
            r.frame_id = j.value("frame_id", "");
            r.det_id = j.value("det_id", static_cast<long long>(dump.records.size()));
            r.logits = j.at("logits").get<std::vector<double>>();
            r.objectness = j.value("objectness", 1.0);
            r.match = parse_match(j.at("match").get<std::string>());
            r.difficulty = parse_difficulty(j.value("difficulty", "unknown"));
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
        if (r.logits.size() != dump.num_classes)
            throw SchemaError("line " + std::to_string(line_no) + ": record has " +
                              std::to_string(r.logits.size()) + " logits, header declares " +
                              std::to_string(dump.num_classes));
        rethrow_with_line(line_no, r);
        if (j.contains("scores")) {
            for (const auto& [method, s] : j["scores"].items()) {
                auto it = std::find_if(dump.scores.begin(), dump.scores.end(),
                                       [&](const ScoreColumn& c) { return c.method == method; });
                if (it == dump.scores.end()) {
                    if (!dump.records.empty())
                        throw SchemaError("line " + std::to_string(line_no) + ": score method '" +
                                          method + "' missing on earlier records");
                    dump.scores.push_back({method, {}, {}});
                    it = std::prev(dump.scores.end());
                }
                it->score.push_back(s.at("score").get<double>());
                it->pred_class.push_back(s.value("pred_class", -1));
            }
        }
        dump.records.push_back(std::move(r));
        for (const auto& c : dump.scores)
            if (c.score.size() != dump.records.size())
                throw SchemaError("line " + std::to_string(line_no) + ": score method '" + c.method +
                                  "' missing");
    }
    return dump;
}

void write_detections_jsonl(std::ostream& out, const DetectionDump& dump) {
    out << header_json(dump.num_classes, "detections").dump() << '\n';
    for (std::size_t i = 0; i < dump.records.size(); ++i) {
        const auto& r = dump.records[i];
        json j{{"frame_id", r.frame_id},
               {"det_id", r.det_id},
               {"logits", r.logits},
               {"objectness", r.objectness},
               {"match", to_string(r.match)},
               {"difficulty", to_string(r.difficulty)}};
        if (!dump.scores.empty()) {
            json s = json::object();
            for (const auto& c : dump.scores)
                s[c.method] = json{{"score", c.score.at(i)}, {"pred_class", c.pred_class.at(i)}};
            j["scores"] = std::move(s);
        }
        out << j.dump() << '\n';
    }
}

std::vector<TrainingRecord> read_training_csv(std::istream& in) {
    std::size_t line_no = 0;
    auto layout = read_csv_preamble(in, line_no);
    if (!layout.true_class && !layout.match)
        throw SchemaError("training dump needs a true_class or match column");
    std::vector<TrainingRecord> out;
    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != layout.width)
            throw ParseError(line_no, "expected " + std::to_string(layout.width) + " fields, got " +
                                          std::to_string(f.size()));
        TrainingRecord r;
        if (layout.true_class) {
            r.true_class = static_cast<int>(parse_integer(f[*layout.true_class], line_no, "true_class"));
        } else {
            Match m;
            try {
                m = parse_match(f[*layout.match]);
            } catch (const ValidationError& e) {
                throw ParseError(line_no, e.what());
            }
            if (!m.is_tp()) continue;
            r.true_class = m.true_class;
        }
        for (auto col : layout.logit_cols) r.logits.push_back(parse_real(f[col], line_no, "logit"));
        rethrow_with_line(line_no, r);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<TrainingRecord> read_training_jsonl(std::istream& in) {
    std::size_t line_no = 0;
    // Either a training or a detection dump; only TP rows of the latter are kept.
    std::vector<TrainingRecord> out;
    std::size_t k = 0;
    std::string line;
    bool have_header = false;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        if (!have_header) {
            if (j.value("format", "") != "logitcal-dump")
                throw ParseError(line_no, "missing logitcal-dump header object");
            if (j.value("version", 0) != kDumpVersion) throw SchemaError("unsupported dump version");
            k = j.value("num_classes", std::size_t{0});
            if (k < 2) throw SchemaError("header declares fewer than 2 classes");
            have_header = true;
            continue;
        }
        TrainingRecord r;
        try {
            r.logits = j.at("logits").get<std::vector<double>>();
            if (j.contains("true_class")) {
                r.true_class = j["true_class"].get<int>();
            } else {
                auto m = parse_match(j.at("match").get<std::string>());
                if (!m.is_tp()) continue;
                r.true_class = m.true_class;
            }
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
        if (r.logits.size() != k)
            throw SchemaError("line " + std::to_string(line_no) + ": record has " +
                              std::to_string(r.logits.size()) + " logits, header declares " +
                              std::to_string(k));
        rethrow_with_line(line_no, r);
        out.push_back(std::move(r));
    }
    if (!have_header) throw ParseError(line_no, "missing header");
    return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

}  // namespace

DetectionDump read_detections(std::istream& in, DumpFormat fmt) {
    return fmt == DumpFormat::csv ? read_detections_csv(in) : read_detections_jsonl(in);
}

void write_detections(std::ostream& out, const DetectionDump& dump, DumpFormat fmt) {
    for (const auto& s : dump.scores)
        if (s.score.size() != dump.records.size() || s.pred_class.size() != dump.records.size())
            throw SchemaError("score column '" + s.method + "' length does not match records");
    for (const auto& r : dump.records)
        if (r.logits.size() != dump.num_classes)
            throw SchemaError("record K=" + std::to_string(r.logits.size()) + " differs from dump K=" +
                              std::to_string(dump.num_classes));
    if (fmt == DumpFormat::csv)
        write_detections_csv(out, dump);
    else
        write_detections_jsonl(out, dump);
}

std::vector<TrainingRecord> read_training(std::istream& in, DumpFormat fmt) {
    return fmt == DumpFormat::csv ? read_training_csv(in) : read_training_jsonl(in);
}

void write_training(std::ostream& out, const std::vector<TrainingRecord>& recs, DumpFormat fmt) {
    std::size_t k = recs.empty() ? 0 : recs.front().logits.size();
    for (const auto& r : recs)
        if (r.logits.size() != k) throw SchemaError("training records disagree on K");
    if (fmt == DumpFormat::csv) {
        out << kCsvMagic << ",version=" << kDumpVersion << '\n';
        for (std::size_t c = 0; c < k; ++c) out << "logit_" << c << ',';
        out << "true_class\n";
        for (const auto& r : recs) {
            for (double v : r.logits) out << format_real(v) << ',';
            out << r.true_class << '\n';
        }
    } else {
        out << header_json(k, "training").dump() << '\n';
        for (const auto& r : recs)
            out << json{{"logits", r.logits}, {"true_class", r.true_class}}.dump() << '\n';
    }
}

DetectionDump load_detections(const std::filesystem::path& p) {
    return load_detections(p, format_from_path(p));
}

DetectionDump load_detections(const std::filesystem::path& p, DumpFormat fmt) {
    auto in = open_in(p);
    return read_detections(in, fmt);
}

std::vector<TrainingRecord> load_training(const std::filesystem::path& p) {
    auto in = open_in(p);
    return read_training(in, format_from_path(p));
}

void save_detections(const std::filesystem::path& p, const DetectionDump& dump) {
    std::ostringstream buf;
    write_detections(buf, dump, format_from_path(p));
    auto out = open_out(p);
    out << buf.str();
}

void save_training(const std::filesystem::path& p, const std::vector<TrainingRecord>& recs) {
    std::ostringstream buf;
    write_training(buf, recs, format_from_path(p));
    auto out = open_out(p);
    out << buf.str();
}

DatasetSplit load_split(const std::filesystem::path& train, const std::filesystem::path& validation,
                        const std::filesystem::path& test) {
    DatasetSplit split;
    split.train = load_training(train);
    if (!validation.empty()) split.validation = load_detections(validation).records;
    if (!test.empty()) split.test = load_detections(test).records;
    return split;
}

}  // namespace logitcal

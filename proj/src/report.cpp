#include "logitcal/report.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace logitcal {

std::vector<ScoredDetection> scored_from_dump(const DetectionDump& dump, const ScoreColumn& col) {
    std::vector<ScoredDetection> out(dump.records.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& r = dump.records[i];
        out[i].match = r.match;
        out[i].difficulty = r.difficulty;
        out[i].confidence = col.score.at(i);
        out[i].predicted_class = col.pred_class.at(i);
        if (out[i].predicted_class < 0 || static_cast<std::size_t>(out[i].predicted_class) >= dump.num_classes)
            throw ValidationError("record " + std::to_string(i) + ": pred_class_" + col.method +
                                  " out of range");
    }
    return out;
}

std::string tier_name(const std::optional<Difficulty>& d) {
    return d ? std::string(to_string(*d)) : std::string("all");
}

MethodEvaluation evaluate_method(const std::string& method, const std::vector<ScoredDetection>& scored,
                                 std::size_t num_classes, int ece_bins) {
    MethodEvaluation ev;
    ev.method = method;
    ev.count = scored.size();
    std::vector<double> conf;
    std::vector<bool> correct;
    for (const auto& s : scored) {
        conf.push_back(s.confidence);
        correct.push_back(s.correct());
    }
    ev.reliability = reliability_bins(conf, correct, ece_bins);
    ev.ece = scored.empty() ? 0.0 : ece(conf, correct, ece_bins);

    std::set<Difficulty> tiers;
    for (const auto& s : scored)
        if (s.difficulty != Difficulty::unknown) tiers.insert(s.difficulty);
    std::vector<std::optional<Difficulty>> filters{std::nullopt};
    for (auto t : tiers) filters.emplace_back(t);

    for (std::size_t c = 0; c < num_classes; ++c)
        for (const auto& f : filters) ev.curves.push_back(pr_curve(scored, static_cast<int>(c), f));

    ev.tp_stats = score_stats(scored, Population::tp);
    ev.fp_stats = score_stats(scored, Population::fp);
    return ev;
}

namespace {

std::string csv_safe(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

std::ofstream open_report(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::string opt_real(const std::optional<ScoreStats>& s, double ScoreStats::*field) {
    return s ? format_real((*s).*field) : std::string();
}

}  // namespace

void write_report(const std::vector<MethodEvaluation>& evals, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    auto ece_out = open_report(dir / "ece.csv");
    ece_out << "method,ece_bins,n,ece\n";
    for (const auto& e : evals)
        ece_out << e.method << ',' << e.reliability.size() << ',' << e.count << ',' << format_real(e.ece) << '\n';

    auto rel = open_report(dir / "reliability.csv");
    rel << "method,bin,lower,upper,count,accuracy,confidence\n";
    for (const auto& e : evals)
        for (const auto& b : e.reliability)
            rel << e.method << ',' << b.index << ',' << format_real(b.lower) << ',' << format_real(b.upper)
                << ',' << b.count << ',' << format_real(b.accuracy) << ',' << format_real(b.confidence) << '\n';

    auto auc_out = open_report(dir / "auc.csv");
    auc_out << "method,class,difficulty,positives,points,auc,auc_percent,note\n";
    for (const auto& e : evals)
        for (const auto& c : e.curves)
            auc_out << e.method << ',' << c.class_index << ',' << tier_name(c.difficulty) << ','
                    << c.total_positives << ',' << c.points.size() << ',' << format_real(c.auc) << ','
                    << format_real(100.0 * c.auc) << ',' << csv_safe(c.diagnostic) << '\n';

    auto pr = open_report(dir / "pr_curves.csv");
    pr << "method,class,difficulty,recall,precision,threshold\n";
    for (const auto& e : evals)
        for (const auto& c : e.curves)
            for (const auto& p : c.points)
                pr << e.method << ',' << c.class_index << ',' << tier_name(c.difficulty) << ','
                   << format_real(p.recall) << ',' << format_real(p.precision) << ','
                   << format_real(p.threshold) << '\n';

    auto st = open_report(dir / "score_stats.csv");
    st << "method,population,count,mean,variance\n";
    for (const auto& e : evals) {
        for (auto [name, s] : {std::pair{"TP", &e.tp_stats}, std::pair{"FP", &e.fp_stats}}) {
            st << e.method << ',' << name << ',' << (*s ? (*s)->count : 0) << ','
               << opt_real(*s, &ScoreStats::mean) << ',' << opt_real(*s, &ScoreStats::variance) << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "lambda,bins,ece,mean_auc,error\n";
    for (const auto& r : rows)
        out << format_real(r.lambda) << ',' << r.bins << ',' << format_real(r.ece) << ','
            << format_real(r.mean_auc) << ',' << csv_safe(r.error) << '\n';
}

}  // namespace logitcal

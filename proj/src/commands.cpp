#include "logitcal/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "logitcal/density.hpp"
#include "logitcal/presets.hpp"
#include "logitcal/report.hpp"
#include "logitcal/scoring.hpp"
#include "logitcal/sweep.hpp"
#include "logitcal/temperature.hpp"

namespace logitcal::cli {

namespace {

int fail(std::ostream& err, const char* cmd, const std::string& msg) {
    err << "logitcal: error: " << cmd << ": " << msg << '\n';
    return 1;
}

void warn(std::ostream& err, const char* cmd, const std::string& msg) {
    err << "logitcal: warning: " << cmd << ": " << msg << '\n';
}

PresetRegistry load_registry(const ScoringFlags& flags) {
    PresetRegistry reg;
    if (flags.config) {
        reg.load_ini(*flags.config);
    } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
        reg.load_ini(env);
    }
    return reg;
}

// Writes through a buffer so a failed command never leaves a partial file.
template <class F>
void write_file(const fs::path& p, F&& body) {
    std::ostringstream buf;
    body(buf);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << buf.str();
    if (!f) throw std::runtime_error("write failed: " + p.string());
}

bool needs_model(Method m) { return m == Method::ml || m == Method::map; }

}  // namespace

ScoringConfig resolve_config(Method method, const ScoringFlags& flags) {
    auto reg = load_registry(flags);
    ScoringConfig cfg;
    cfg.method = method;
    if (flags.preset) {
        cfg = reg.find(*flags.preset).config(method);
    } else if (needs_model(method) && !flags.lambda) {
        cfg = reg.find("rgb").config(method);
    }
    if (flags.lambda) cfg.lambda = *flags.lambda;
    if (flags.bins) cfg.bins = *flags.bins;
    if (flags.temperature) cfg.temperature = *flags.temperature;
    if (flags.prior) cfg.prior = *flags.prior;
    if (flags.no_objectness) cfg.use_objectness = false;
    cfg.validate();
    return cfg;
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    try {
        auto train = load_training(a.train);
        auto model = fit_model(train, a.bins);
        write_file(a.out, [&](std::ostream& o) { write_model(o, model); });
        out << "fitted " << model.num_classes << " classes x " << model.bins << " bins from "
            << train.size() << " records -> " << a.out.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail(err, "fit", e.what());
    }
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
    try {
        if (a.methods.empty()) throw std::invalid_argument("no --method given");
        auto dump = load_detections(a.test);

        std::optional<DensityModel> file_model;
        if (a.model) {
            std::ifstream in(*a.model);
            if (!in) throw std::runtime_error("cannot open " + a.model->string());
            file_model = read_model(in);
        }
        std::optional<std::vector<TrainingRecord>> train;
        if (a.train) train = load_training(*a.train);

        for (auto method : a.methods) {
            auto cfg = resolve_config(method, a.flags);
            std::optional<DensityModel> fitted;
            const DensityModel* model = nullptr;
            if (needs_model(method)) {
                if (train) {
                    fitted = fit_model(*train, cfg.bins);
                    model = &*fitted;
                } else if (file_model) {
                    bool bins_requested = a.flags.bins || a.flags.preset;
                    if (bins_requested && file_model->bins != cfg.bins)
                        throw std::invalid_argument(
                            "model was fitted with " + std::to_string(file_model->bins) +
                            " bins but " + std::string(to_string(method)) + " is configured for " +
                            std::to_string(cfg.bins) + " (refit, or pass --train)");
                    cfg.bins = file_model->bins;
                    model = &*file_model;
                } else {
                    throw std::invalid_argument(std::string(to_string(method)) +
                                                " needs --model or --train");
                }
                if (!dump.records.empty() && dump.num_classes != model->num_classes)
                    throw SchemaError("dump has K=" + std::to_string(dump.num_classes) +
                                      ", model has K=" + std::to_string(model->num_classes));
            }

            auto scored = score_all(dump.records, model, cfg);
            ScoreColumn col{std::string(to_string(method)), {}, {}};
            col.score.reserve(scored.size());
            col.pred_class.reserve(scored.size());
            for (const auto& s : scored) {
                col.score.push_back(s.confidence);
                col.pred_class.push_back(s.predicted_class);
            }
            dump.set_scores(std::move(col));
            out << to_string(method) << ": lambda=" << format_real(cfg.lambda) << " bins=" << cfg.bins
                << " temperature=" << format_real(cfg.temperature)
                << " objectness=" << (cfg.use_objectness ? "on" : "off") << '\n';
        }

        auto fmt = a.format.value_or(format_from_path(a.out));
        write_file(a.out, [&](std::ostream& o) { write_detections(o, dump, fmt); });
        out << "scored " << dump.records.size() << " records -> " << a.out.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail(err, "score", e.what());
    }
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    try {
        auto dump = load_detections(a.scored);
        std::vector<const ScoreColumn*> cols;
        if (a.methods.empty()) {
            for (const auto& c : dump.scores) cols.push_back(&c);
            if (cols.empty()) throw std::invalid_argument("dump has no score_<method> columns");
        } else {
            for (const auto& m : a.methods) {
                auto c = dump.find_scores(m);
                if (!c) throw std::invalid_argument("dump has no score_" + m + " column");
                cols.push_back(c);
            }
        }

        std::vector<MethodEvaluation> evals;
        for (auto c : cols) {
            auto scored = scored_from_dump(dump, *c);
            evals.push_back(evaluate_method(c->method, scored, dump.num_classes, a.ece_bins));
        }
        write_report(evals, a.out_dir);

        for (const auto& e : evals) {
            out << e.method << ": ECE=" << format_real(e.ece);
            if (e.tp_stats) out << " TP mean=" << format_real(e.tp_stats->mean);
            if (e.fp_stats) out << " FP mean=" << format_real(e.fp_stats->mean);
            out << '\n';
            for (const auto& c : e.curves)
                if (!c.difficulty)
                    out << "  class " << c.class_index << " AUC=" << format_real(100.0 * c.auc) << "%\n";
        }
        out << "report -> " << a.out_dir.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail(err, "eval", e.what());
    }
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    try {
        DatasetSplit split;
        split.train = load_training(a.train);
        split.test = load_detections(a.test).records;
        auto base = resolve_config(a.method, a.flags);
        auto rows = sweep(split, a.lambdas, a.bins, base, {a.ece_bins});
        for (const auto& r : rows)
            if (!r.error.empty())
                warn(err, "sweep", "lambda=" + format_real(r.lambda) + " bins=" + std::to_string(r.bins) +
                                       ": " + r.error);
        if (a.out) {
            write_file(*a.out, [&](std::ostream& o) { write_sweep_csv(o, rows); });
        } else {
            write_sweep_csv(out, rows);
        }
        return 0;
    } catch (const std::exception& e) {
        return fail(err, "sweep", e.what());
    }
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
    try {
        auto dump = generate_synthetic(a.spec);
        auto fmt = a.format.value_or(format_from_path(a.out));
        write_file(a.out, [&](std::ostream& o) { write_detections(o, dump, fmt); });
        out << "wrote " << a.spec.n_tp << " TP + " << a.spec.n_fp << " FP records -> " << a.out.string()
            << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail(err, "synth", e.what());
    }
}

int cmd_fit_temperature(const FitTemperatureArgs& a, std::ostream& out, std::ostream& err) {
    try {
        auto val = load_detections(a.validation);
        TemperatureSearch search;
        search.lower = a.lower;
        search.upper = a.upper;
        auto fit = fit_temperature(val.records, search);
        if (fit.at_boundary)
            warn(err, "fit-temperature",
                 "optimum at the search bracket edge; NLL may be monotone on this data");
        out << "temperature=" << format_real(fit.temperature) << " nll=" << format_real(fit.nll)
            << " samples=" << fit.samples << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail(err, "fit-temperature", e.what());
    }
}

int cmd_upsample(const UpsampleArgs& a, std::ostream& out, std::ostream& err) {
    try {
        a.filter.validate();
        auto cloud = read_velodyne_bin(a.cloud);
        auto calib = load_kitti_calib(a.calib, a.width, a.height);
        auto sparse = project(cloud, calib, a.channel);
        auto dense = bilateral_upsample(sparse, a.filter);
        if (a.sparse_out) write_map(sparse, *a.sparse_out, a.format, a.range);
        write_map(dense, a.out, a.format, a.range);
        out << "projected " << sparse.occupied_count() << " pixels, upsampled to "
            << dense.occupied_count() << " -> " << a.out.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail(err, "upsample", e.what());
    }
}

}  // namespace logitcal::cli

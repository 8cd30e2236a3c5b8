// logitcal: post-hoc calibration of detector scores from exported logits.
//
//   logitcal synth   --out test.csv --seed 7
//   logitcal fit     --train train.csv --bins 22 --out model.json
//   logitcal score   --test test.csv --model model.json --method ml --preset rgb --out scored.csv
//   logitcal eval    --scored scored.csv --out-dir report/
//   logitcal sweep   --train train.csv --test test.csv --lambdas 1e-6,1e-3 --bins-list 20,22
//   logitcal upsample --cloud 000000.bin --calib 000000.txt --out rav.pgm

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "logitcal/commands.hpp"
#include "logitcal/parallel.hpp"
#include "logitcal/presets.hpp"

namespace {

using namespace logitcal;
using namespace logitcal::cli;

const std::map<std::string, Method> kMethods{
    {"sg", Method::sg}, {"softmax", Method::softmax}, {"ml", Method::ml}, {"map", Method::map}};

void add_scoring_flags(CLI::App* app, ScoringFlags& f, std::string& prior) {
    app->add_option("--preset", f.preset, "Named hyperparameters (rgb, rav, rev, second-3d, or from --config)");
    app->add_option("--lambda", f.lambda, "Additive smoothing")->check(CLI::NonNegativeNumber);
    app->add_option("--bins", f.bins, "Histogram bins")->check(CLI::PositiveNumber);
    app->add_option("--temperature", f.temperature, "Softmax temperature")->check(CLI::PositiveNumber);
    app->add_option("--prior", prior, "MAP prior: gaussian (density at the logit) or frequency")
        ->check(CLI::IsMember({"gaussian", "frequency"}));
    app->add_flag("--no-objectness", f.no_objectness, "Do not multiply scores by objectness");
    app->add_option("--config", f.config, "INI file with extra presets (default: $LOGITCAL_CONFIG)")
        ->check(CLI::ExistingFile);
}

void apply_prior(ScoringFlags& f, const std::string& prior) {
    if (!prior.empty()) f.prior = parse_prior_mode(prior);
}

std::optional<DumpFormat> dump_format(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_dump_format(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-hoc ML/MAP calibration of object-detection scores"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)");

    // fit
    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit per-class likelihood histograms and Gaussian priors");
    fit_cmd->add_option("--train", fit.train, "Training dump")->required()->check(CLI::ExistingFile);
    fit_cmd->add_option("--bins", fit.bins, "Histogram bins")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--out", fit.out, "Model JSON")->required();

    // score
    ScoreArgs score;
    std::vector<std::string> score_methods;
    std::string score_prior, score_format;
    auto* score_cmd = app.add_subcommand("score", "Append score_<method> columns to a dump");
    score_cmd->add_option("--test", score.test, "Detection dump")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--model", score.model, "Model JSON from `fit`")->check(CLI::ExistingFile);
    score_cmd->add_option("--train", score.train, "Fit on the fly from this training dump")
        ->check(CLI::ExistingFile);
    score_cmd->add_option("--method", score_methods, "sg, softmax, ml, map (repeatable)")
        ->required()
        ->check(CLI::IsMember({"sg", "softmax", "ml", "map"}));
    add_scoring_flags(score_cmd, score.flags, score_prior);
    score_cmd->add_option("--out", score.out, "Scored dump")->required();
    score_cmd->add_option("--format", score_format, "csv or jsonl (default: from extension)")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    // eval
    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "ECE, PR curves, AUC and TP/FP score statistics");
    eval_cmd->add_option("--scored", eval.scored, "Scored dump")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--ece-bins", eval.ece_bins, "ECE bins")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--method", eval.methods, "Only these score columns");
    eval_cmd->add_option("--out-dir", eval.out_dir, "Report directory")->required();

    // sweep
    SweepArgs sw;
    std::string sweep_method = "ml", sweep_prior;
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid over lambda x bins");
    sweep_cmd->add_option("--train", sw.train, "Training dump")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--test", sw.test, "Test dump")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--lambdas", sw.lambdas, "Comma-separated lambdas")->required()->delimiter(',');
    sweep_cmd->add_option("--bins-list", sw.bins, "Comma-separated bin counts")->required()->delimiter(',');
    sweep_cmd->add_option("--method", sweep_method, "ml or map")->check(CLI::IsMember({"ml", "map"}));
    sweep_cmd->add_option("--ece-bins", sw.ece_bins, "ECE bins")->check(CLI::PositiveNumber);
    add_scoring_flags(sweep_cmd, sw.flags, sweep_prior);
    sweep_cmd->add_option("--out", sw.out, "Sweep CSV (default: stdout)");

    // synth
    SynthArgs synth;
    std::string synth_format;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dump with overconfident FPs");
    synth_cmd->add_option("--classes", synth.spec.num_classes, "K");
    synth_cmd->add_option("--n-tp", synth.spec.n_tp, "True positives");
    synth_cmd->add_option("--n-fp", synth.spec.n_fp, "False positives");
    synth_cmd->add_option("--tp-means", synth.spec.tp_logit_means, "Per-class on-target TP logit means")
        ->delimiter(',');
    synth_cmd->add_option("--off-target-mean", synth.spec.off_target_mean, "TP off-target logit mean");
    synth_cmd->add_option("--fp-means", synth.spec.fp_logit_means, "Per-class FP logit means")->delimiter(',');
    synth_cmd->add_option("--fp-boost", synth.spec.fp_spurious_boost, "Lift of one FP logit");
    synth_cmd->add_option("--sigma", synth.spec.noise_sigma, "Logit noise");
    synth_cmd->add_option("--objectness", synth.spec.objectness, "Objectness of every record");
    synth_cmd->add_option("--seed", synth.spec.seed, "64-bit seed");
    synth_cmd->add_option("--out", synth.out, "Output dump")->required();
    synth_cmd->add_option("--format", synth_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

    // fit-temperature
    FitTemperatureArgs ft;
    auto* ft_cmd = app.add_subcommand("fit-temperature", "Fit the softmax temperature by NLL on TP records");
    ft_cmd->add_option("--validation", ft.validation, "Validation dump")->required()->check(CLI::ExistingFile);
    ft_cmd->add_option("--lower", ft.lower, "Bracket lower end")->check(CLI::PositiveNumber);
    ft_cmd->add_option("--upper", ft.upper, "Bracket upper end")->check(CLI::PositiveNumber);

    // upsample
    UpsampleArgs up;
    std::string channel = "depth", map_format = "pgm16";
    std::vector<double> range;
    bool no_range_weight = false;
    auto* up_cmd = app.add_subcommand("upsample", "Project a velodyne scan and bilateral-upsample it");
    up_cmd->add_option("--cloud", up.cloud, "KITTI velodyne .bin")->required()->check(CLI::ExistingFile);
    up_cmd->add_option("--calib", up.calib, "KITTI calibration .txt")->required()->check(CLI::ExistingFile);
    up_cmd->add_option("--width", up.width, "Image width")->check(CLI::PositiveNumber);
    up_cmd->add_option("--height", up.height, "Image height")->check(CLI::PositiveNumber);
    up_cmd->add_option("--channel", channel, "depth (range view) or reflectance")
        ->check(CLI::IsMember({"depth", "reflectance"}));
    up_cmd->add_option("--mask-size", up.filter.mask_size, "Odd filter window side");
    up_cmd->add_option("--iterations", up.filter.iterations, "Filter passes");
    up_cmd->add_flag("--no-range-weight", no_range_weight, "Distance-only weights");
    up_cmd->add_option("--format", map_format, "pgm16, png16 or csv")
        ->check(CLI::IsMember({"pgm16", "png16", "csv"}));
    up_cmd->add_option("--range", range, "Quantization range min,max (default: data range)")
        ->delimiter(',')
        ->expected(2);
    up_cmd->add_option("--sparse-out", up.sparse_out, "Also write the projected sparse map");
    up_cmd->add_option("--out", up.out, "Output map")->required();

    CLI11_PARSE(app, argc, argv);
    set_threads(threads);

    try {
        if (*fit_cmd) return cmd_fit(fit, std::cout, std::cerr);
        if (*score_cmd) {
            for (const auto& m : score_methods) score.methods.push_back(kMethods.at(m));
            apply_prior(score.flags, score_prior);
            score.format = dump_format(score_format);
            return cmd_score(score, std::cout, std::cerr);
        }
        if (*eval_cmd) return cmd_eval(eval, std::cout, std::cerr);
        if (*sweep_cmd) {
            sw.method = kMethods.at(sweep_method);
            apply_prior(sw.flags, sweep_prior);
            return cmd_sweep(sw, std::cout, std::cerr);
        }
        if (*synth_cmd) {
            synth.format = dump_format(synth_format);
            return cmd_synth(synth, std::cout, std::cerr);
        }
        if (*ft_cmd) return cmd_fit_temperature(ft, std::cout, std::cerr);
        if (*up_cmd) {
            up.channel = channel == "depth" ? MapChannel::depth : MapChannel::reflectance;
            up.format = parse_map_format(map_format);
            up.filter.range_weight = !no_range_weight;
            if (!range.empty()) up.range = MapRange{range[0], range[1]};
            return cmd_upsample(up, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "logitcal: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

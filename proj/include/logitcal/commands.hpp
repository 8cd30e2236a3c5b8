#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "logitcal/bilateral.hpp"
#include "logitcal/config.hpp"
#include "logitcal/dump_io.hpp"
#include "logitcal/map_io.hpp"
#include "logitcal/synth.hpp"

// Subcommands of the `logitcal` tool. Each returns the process exit code and reports
// failures on `err` as one line: "logitcal: error: <command>: <message>".
namespace logitcal::cli {

namespace fs = std::filesystem;

/// Knobs shared by commands that build a ScoringConfig.
struct ScoringFlags {
    std::optional<std::string> preset;  // rgb when absent and no lambda given for ml/map
    std::optional<double> lambda;
    std::optional<int> bins;
    std::optional<double> temperature;
    std::optional<PriorMode> prior;
    bool no_objectness = false;
    std::optional<fs::path> config;  // extra presets; falls back to $LOGITCAL_CONFIG
};

/// Preset (if any) for `method`, then explicit flags on top.
ScoringConfig resolve_config(Method method, const ScoringFlags& flags);

struct FitArgs {
    fs::path train;
    int bins = 22;
    fs::path out;
};
int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err);

struct ScoreArgs {
    fs::path test;
    std::optional<fs::path> model;  // one of model / train
    std::optional<fs::path> train;
    std::vector<Method> methods;
    ScoringFlags flags;
    fs::path out;
    std::optional<DumpFormat> format;
};
int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err);

struct EvalArgs {
    fs::path scored;
    int ece_bins = 10;
    fs::path out_dir;
    std::vector<std::string> methods;  // empty: every score column in the dump
};
int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err);

struct SweepArgs {
    fs::path train;
    fs::path test;
    std::vector<double> lambdas;
    std::vector<int> bins;
    Method method = Method::ml;
    ScoringFlags flags;
    int ece_bins = 10;
    std::optional<fs::path> out;  // stdout when absent
};
int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err);

struct SynthArgs {
    SyntheticSpec spec;
    fs::path out;
    std::optional<DumpFormat> format;
};
int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err);

struct FitTemperatureArgs {
    fs::path validation;
    double lower = 0.05;
    double upper = 20.0;
};
int cmd_fit_temperature(const FitTemperatureArgs& a, std::ostream& out, std::ostream& err);

struct UpsampleArgs {
    fs::path cloud;
    fs::path calib;
    int width = 1242;
    int height = 375;
    MapChannel channel = MapChannel::depth;
    BilateralOptions filter;
    MapFormat format = MapFormat::pgm16;
    std::optional<MapRange> range;
    fs::path out;
    std::optional<fs::path> sparse_out;
};
int cmd_upsample(const UpsampleArgs& a, std::ostream& out, std::ostream& err);

}  // namespace logitcal::cli

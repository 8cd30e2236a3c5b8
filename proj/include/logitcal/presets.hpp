#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "logitcal/config.hpp"

namespace logitcal {

/// Named hyperparameter set for one sensing modality. ML and MAP carry their own
/// smoothing and bin counts; softmax its temperature.
struct Preset {
    std::string name;
    double ml_lambda = 0.0;
    int ml_bins = 22;
    double map_lambda = 0.0;
    int map_bins = 22;
    double temperature = 1.0;
    bool use_objectness = true;
    PriorMode prior = PriorMode::gaussian_density;

    ScoringConfig config(Method m) const;
};

/// Published settings: rgb, rav, rev (YOLOv4 on camera, range-view and reflectance-view
/// maps) and second-3d (SECOND on point clouds). Softmax entries use TS = 1.82.
const std::vector<Preset>& builtin_presets();

/// Built-ins plus presets loaded from an INI file. Names are unique; a file may not
/// redefine a built-in.
class PresetRegistry {
public:
    PresetRegistry();

    /// Sections are preset names; keys: ml.lambda, ml.bins, map.lambda, map.bins,
    /// softmax.temperature, use_objectness, prior (gaussian|frequency).
    void load_ini(const std::filesystem::path& p);

    /// Throws std::invalid_argument for unknown names.
    const Preset& find(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, Preset, std::less<>> presets_;
};

/// Name of the environment variable holding a default preset file.
inline constexpr const char* kConfigEnvVar = "LOGITCAL_CONFIG";

}  // namespace logitcal

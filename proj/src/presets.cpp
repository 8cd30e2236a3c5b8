#include "logitcal/presets.hpp"

#include <set>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace logitcal {

ScoringConfig Preset::config(Method m) const {
    ScoringConfig cfg;
    cfg.method = m;
    cfg.use_objectness = use_objectness;
    cfg.prior = prior;
    cfg.temperature = temperature;
    switch (m) {
    case Method::ml:
        cfg.lambda = ml_lambda;
        cfg.bins = ml_bins;
        break;
    case Method::map:
        cfg.lambda = map_lambda;
        cfg.bins = map_bins;
        break;
    case Method::sg:
    case Method::softmax:
        break;
    }
    return cfg;
}

const std::vector<Preset>& builtin_presets() {
    static const std::vector<Preset> presets = {
        // name       lambda_ML bins_ML lambda_MAP bins_MAP  TS
        {"rgb",       1.6e-6,  22,     1.0e-8,    24,       1.82},
        {"rav",       1.3e-3,  20,     1.7e-5,    24,       1.82},
        {"rev",       1.3e-3,  23,     8.0e-5,    5,        1.82},
        {"second-3d", 5.0e-3,  22,     1.0e-4,    24,       1.82},
    };
    return presets;
}

PresetRegistry::PresetRegistry() {
    for (const auto& p : builtin_presets()) presets_.emplace(p.name, p);
}

namespace {

const std::set<std::string> kKeys{"ml.lambda", "ml.bins", "map.lambda", "map.bins",
                                  "softmax.temperature", "use_objectness", "prior"};

}  // namespace

void PresetRegistry::load_ini(const std::filesystem::path& p) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(p.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("preset file: ") + e.what());
    }
    for (const auto& [name, sec] : tree) {
        if (sec.empty())
            throw std::invalid_argument("preset file " + p.string() + ": key '" + name +
                                        "' outside a [section]");
        if (presets_.count(name))
            throw std::invalid_argument("preset file " + p.string() + " redefines preset '" + name + "'");
        for (const auto& [key, value] : sec) {
            if (!kKeys.count(key))
                throw std::invalid_argument("preset '" + name + "': unknown key '" + key + "'");
            if (!value.empty()) throw std::invalid_argument("preset '" + name + "': nested key '" + key + "'");
        }
        // Keys contain dots, so look them up with a separator that never occurs in them.
        auto get = [&]<class T>(const char* key, T fallback) {
            return sec.get<T>(pt::ptree::path_type(key, '/'), fallback);
        };
        Preset preset;
        preset.name = name;
        try {
            preset.ml_lambda = get("ml.lambda", 0.0);
            preset.ml_bins = get("ml.bins", 22);
            preset.map_lambda = get("map.lambda", 0.0);
            preset.map_bins = get("map.bins", 22);
            preset.temperature = get("softmax.temperature", 1.0);
            preset.use_objectness = get("use_objectness", true);
            preset.prior = parse_prior_mode(get("prior", std::string("gaussian")));
        } catch (const pt::ptree_error& e) {
            throw std::invalid_argument("preset '" + name + "': " + e.what());
        }
        for (auto m : {Method::ml, Method::map, Method::softmax}) preset.config(m).validate();
        presets_.emplace(name, preset);
    }
}

const Preset& PresetRegistry::find(std::string_view name) const {
    auto it = presets_.find(name);
    if (it == presets_.end()) throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> PresetRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : presets_) out.push_back(k);
    return out;
}

}  // namespace logitcal

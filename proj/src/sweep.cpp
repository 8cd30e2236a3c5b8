#include "logitcal/sweep.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "logitcal/density.hpp"
#include "logitcal/metrics.hpp"
#include "logitcal/scoring.hpp"

namespace logitcal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool needs_model(Method m) { return m == Method::ml || m == Method::map; }

SweepRow evaluate_with(const DatasetSplit& split, const DensityModel* model, const ScoringConfig& cfg,
                       int ece_bins) {
    SweepRow row{cfg.lambda, cfg.bins, kNaN, kNaN, {}};
    try {
        if (split.test.empty()) throw std::invalid_argument("empty test set");
        auto scored = score_all_serial(split.test, model, cfg);
        row.ece = ece(scored, ece_bins);
        std::size_t k = split.test.front().logits.size();
        double sum = 0.0;
        std::size_t used = 0;
        for (std::size_t c = 0; c < k; ++c) {
            auto curve = pr_curve(scored, static_cast<int>(c));
            if (curve.total_positives == 0) continue;
            sum += curve.auc;
            ++used;
        }
        row.mean_auc = used ? sum / static_cast<double>(used) : kNaN;
    } catch (const std::exception& e) {
        row.ece = row.mean_auc = kNaN;
        row.error = e.what();
    }
    return row;
}

}  // namespace

SweepRow evaluate_cell(const DatasetSplit& split, const ScoringConfig& cfg, int ece_bins) {
    std::optional<DensityModel> model;
    if (needs_model(cfg.method)) {
        try {
            model = fit_model(split.train, cfg.bins);
        } catch (const std::exception& e) {
            return {cfg.lambda, cfg.bins, kNaN, kNaN, e.what()};
        }
    }
    return evaluate_with(split, model ? &*model : nullptr, cfg, ece_bins);
}

std::vector<SweepRow> sweep(const DatasetSplit& split, std::span<const double> lambdas,
                            std::span<const int> bins_list, const ScoringConfig& base,
                            const SweepOptions& opts) {
    if (lambdas.empty() || bins_list.empty()) throw std::invalid_argument("sweep grid is empty");

    // One model per bin count, shared read-only by all cells with that count.
    const auto nb = static_cast<std::ptrdiff_t>(bins_list.size());
    std::vector<std::optional<DensityModel>> models(bins_list.size());
    std::vector<std::string> fit_errors(bins_list.size());
    if (needs_model(base.method)) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t b = 0; b < nb; ++b) {
            try {
                models[b] = fit_model(split.train, bins_list[b]);
            } catch (const std::exception& e) {
                fit_errors[b] = e.what();
            }
        }
    }

    const auto cells = static_cast<std::ptrdiff_t>(lambdas.size() * bins_list.size());
    std::vector<SweepRow> rows(static_cast<std::size_t>(cells));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < cells; ++i) {
        auto li = static_cast<std::size_t>(i) / bins_list.size();
        auto bi = static_cast<std::size_t>(i) % bins_list.size();
        ScoringConfig cfg = base;
        cfg.lambda = lambdas[li];
        cfg.bins = bins_list[bi];
        if (!fit_errors[bi].empty()) {
            rows[i] = {cfg.lambda, cfg.bins, kNaN, kNaN, fit_errors[bi]};
            continue;
        }
        try {
            cfg.validate();
        } catch (const std::exception& e) {
            rows[i] = {cfg.lambda, cfg.bins, kNaN, kNaN, e.what()};
            continue;
        }
        rows[i] = evaluate_with(split, models[bi] ? &*models[bi] : nullptr, cfg, opts.ece_bins);
    }
    return rows;
}

}  // namespace logitcal

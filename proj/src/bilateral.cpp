#include "logitcal/bilateral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace logitcal {

void BilateralOptions::validate() const {
    if (mask_size < 1 || mask_size % 2 == 0)
        throw std::invalid_argument("mask size must be a positive odd integer, got " +
                                    std::to_string(mask_size));
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
}

namespace {

double spatial_weight(int dx, int dy) {
    return 1.0 / (1.0 + std::sqrt(static_cast<double>(dx * dx + dy * dy)));
}

double range_kernel(double r0, double ri) { return 1.0 / (1.0 + std::abs(r0 - ri)); }

SparseMap serial_pass(const SparseMap& in, const BilateralOptions& opts) {
    const int half = opts.mask_size / 2;
    SparseMap out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            const int y0 = std::max(0, y - half), y1 = std::min(in.height() - 1, y + half);
            const int x0 = std::max(0, x - half), x1 = std::min(in.width() - 1, x + half);

            double r0 = 0.0;
            if (in.occupied(x, y)) {
                r0 = in.value(x, y);
            } else {
                double sum = 0.0;
                int n = 0;
                for (int v = y0; v <= y1; ++v)
                    for (int u = x0; u <= x1; ++u)
                        if (in.occupied(u, v)) {
                            sum += in.value(u, v);
                            ++n;
                        }
                if (n == 0) continue;
                r0 = sum / n;
            }

            // Offsets from the first value in the window, so a constant window
            // reproduces its value bit for bit.
            bool have_ref = false;
            double ref = 0.0, num = 0.0, den = 0.0;
            for (int v = y0; v <= y1; ++v) {
                for (int u = x0; u <= x1; ++u) {
                    if (!in.occupied(u, v)) continue;
                    double ri = in.value(u, v);
                    if (!have_ref) {
                        ref = ri;
                        have_ref = true;
                    }
                    double w = spatial_weight(u - x, v - y);
                    if (opts.range_weight) w *= range_kernel(r0, ri);
                    num += w * (ri - ref);
                    den += w;
                }
            }
            out.set(x, y, ref + num / den);
        }
    }
    return out;
}

// Same arithmetic as serial_pass in the same order; spatial weights come from a table
// and rows are distributed across threads.
SparseMap parallel_pass(const SparseMap& in, const BilateralOptions& opts) {
    const int half = opts.mask_size / 2;
    const int side = opts.mask_size;
    std::vector<double> spatial(static_cast<std::size_t>(side) * side);
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx)
            spatial[static_cast<std::size_t>((dy + half) * side + dx + half)] = spatial_weight(dx, dy);

    const int w = in.width(), h = in.height();
    const auto& vals = in.values();
    const auto& occ = in.occupancy();
    std::vector<double> out_vals(in.size(), 0.0);
    std::vector<std::uint8_t> out_occ(in.size(), 0);

#pragma omp parallel for schedule(dynamic, 4)
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - half), y1 = std::min(h - 1, y + half);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - half), x1 = std::min(w - 1, x + half);
            const auto center = static_cast<std::size_t>(y) * w + x;

            double r0 = 0.0;
            if (occ[center]) {
                r0 = vals[center];
            } else {
                double sum = 0.0;
                int n = 0;
                for (int v = y0; v <= y1; ++v) {
                    const auto row = static_cast<std::size_t>(v) * w;
                    for (int u = x0; u <= x1; ++u)
                        if (occ[row + u]) {
                            sum += vals[row + u];
                            ++n;
                        }
                }
                if (n == 0) continue;
                r0 = sum / n;
            }

            bool have_ref = false;
            double ref = 0.0, num = 0.0, den = 0.0;
            for (int v = y0; v <= y1; ++v) {
                const auto row = static_cast<std::size_t>(v) * w;
                const double* srow = &spatial[static_cast<std::size_t>((v - y + half) * side + half)];
                for (int u = x0; u <= x1; ++u) {
                    if (!occ[row + u]) continue;
                    double ri = vals[row + u];
                    if (!have_ref) {
                        ref = ri;
                        have_ref = true;
                    }
                    double wt = srow[u - x];
                    if (opts.range_weight) wt *= range_kernel(r0, ri);
                    num += wt * (ri - ref);
                    den += wt;
                }
            }
            out_vals[center] = ref + num / den;
            out_occ[center] = 1;
        }
    }

    SparseMap out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            auto i = static_cast<std::size_t>(y) * w + x;
            if (out_occ[i]) out.set(x, y, out_vals[i]);
        }
    return out;
}

}  // namespace

SparseMap bilateral_upsample(const SparseMap& map, const BilateralOptions& opts) {
    opts.validate();
    SparseMap cur = parallel_pass(map, opts);
    for (int i = 1; i < opts.iterations; ++i) cur = parallel_pass(cur, opts);
    return cur;
}

SparseMap bilateral_upsample_serial(const SparseMap& map, const BilateralOptions& opts) {
    opts.validate();
    SparseMap cur = serial_pass(map, opts);
    for (int i = 1; i < opts.iterations; ++i) cur = serial_pass(cur, opts);
    return cur;
}

}  // namespace logitcal

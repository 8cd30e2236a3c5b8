#pragma once

// Brute-force reference computations used by the tests. None of these call into the
// library; they restate each definition in the most direct way available.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <set>
#include <vector>

namespace oracle {

// Histogram counts over [lo, hi] with `bins` equal-width bins, [low, high) except the
// last bin, found by scanning every bin for every value.
inline std::vector<double> histogram(const std::vector<double>& values, int bins) {
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    double w = (hi - lo) / bins;
    std::vector<double> f(static_cast<std::size_t>(bins), 0.0);
    for (double v : values) {
        for (int i = 0; i < bins; ++i) {
            double a = lo + i * w;
            double b = i + 1 < bins ? lo + (i + 1) * w : hi;
            bool last = i + 1 == bins;
            if (v >= a && (v < b || (last && v <= b))) {
                f[static_cast<std::size_t>(i)] += 1.0;
                break;
            }
        }
    }
    for (auto& x : f) x /= static_cast<double>(values.size());
    return f;
}

inline double normal_pdf(double x, double mu, double var) {
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * var) * std::exp(-(x - mu) * (x - mu) / (2.0 * var));
}

// Softmax evaluated in long double without any stabilization trick.
inline std::vector<double> softmax(const std::vector<double>& z, double t) {
    long double s = 0;
    std::vector<long double> e;
    for (double v : z) {
        e.push_back(std::exp(static_cast<long double>(v) / t));
        s += e.back();
    }
    std::vector<double> out;
    for (auto v : e) out.push_back(static_cast<double>(v / s));
    return out;
}

// ECE as a double loop: for every bin, scan every sample.
inline double ece(const std::vector<double>& conf, const std::vector<bool>& correct, int m_bins) {
    const double n = static_cast<double>(conf.size());
    double total = 0.0;
    for (int m = 1; m <= m_bins; ++m) {
        double lo = (m - 1) / static_cast<double>(m_bins);
        double hi = m / static_cast<double>(m_bins);
        double cnt = 0, acc = 0, cs = 0;
        for (std::size_t i = 0; i < conf.size(); ++i) {
            bool in = (conf[i] > lo && conf[i] <= hi) || (m == 1 && conf[i] == 0.0);
            if (!in) continue;
            cnt += 1;
            cs += conf[i];
            if (correct[i]) acc += 1;
        }
        if (cnt > 0) total += cnt / n * std::abs(acc / cnt - cs / cnt);
    }
    return total;
}

struct Det {
    double score;
    int pred;
    int truth;  // -1 for FP
};

struct Point {
    double threshold, recall, precision;
    std::size_t tp, fp;
};

// Every distinct threshold, recounted from scratch.
inline std::vector<Point> pr_points(const std::vector<Det>& dets, int c) {
    std::set<double, std::greater<>> thresholds;
    std::size_t positives = 0;
    for (const auto& d : dets) {
        if (d.pred == c) thresholds.insert(d.score);
        if (d.truth == c) ++positives;
    }
    std::vector<Point> out;
    if (positives == 0) return out;
    for (double t : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (const auto& d : dets) {
            if (d.pred != c || d.score < t) continue;
            if (d.truth == c) ++tp; else ++fp;
        }
        out.push_back({t, static_cast<double>(tp) / static_cast<double>(positives),
                       static_cast<double>(tp) / static_cast<double>(tp + fp), tp, fp});
    }
    return out;
}

// Area under the piecewise-linear precision(recall), flat from recall 0 to the first
// point, by composite Simpson on each recall interval.
inline double pr_area(const std::vector<Point>& pts) {
    if (pts.empty()) return 0.0;
    double area = pts.front().precision * pts.front().recall;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double r0 = pts[i].recall, r1 = pts[i + 1].recall;
        if (r1 <= r0) continue;
        double p0 = pts[i].precision, p1 = pts[i + 1].precision;
        auto f = [&](double r) { return p0 + (p1 - p0) * (r - r0) / (r1 - r0); };
        const int k = 64;
        double h = (r1 - r0) / k, s = f(r0) + f(r1);
        for (int j = 1; j < k; ++j) s += (j % 2 ? 4.0 : 2.0) * f(r0 + j * h);
        area += s * h / 3.0;
    }
    return area;
}

// Mean negative log-likelihood of labels under softmax(z / t).
inline double nll(const std::vector<std::vector<double>>& z, const std::vector<int>& y, double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double top = *std::max_element(z[i].begin(), z[i].end()) / t;
        double den = 0.0;
        for (double v : z[i]) den += std::exp(v / t - top);
        s += top + std::log(den) - z[i][static_cast<std::size_t>(y[i])] / t;
    }
    return s / static_cast<double>(z.size());
}

// argmin of nll over t = lo, lo + step, ..., hi.
inline double grid_temperature(const std::vector<std::vector<double>>& z, const std::vector<int>& y,
                               double lo, double hi, double step) {
    double best_t = lo, best = nll(z, y, lo);
    int n = static_cast<int>(std::lround((hi - lo) / step));
    for (int i = 1; i <= n; ++i) {
        double t = lo + i * step;
        double v = nll(z, y, t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    return best_t;
}

}  // namespace oracle

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "logitcal/bilateral.hpp"
#include "logitcal/density.hpp"
#include "logitcal/dump_io.hpp"
#include "logitcal/map_io.hpp"
#include "logitcal/metrics.hpp"
#include "logitcal/presets.hpp"
#include "logitcal/scoring.hpp"
#include "logitcal/synth.hpp"
#include "logitcal/temperature.hpp"
#include "oracle.hpp"
#include "temp_dir.hpp"

using namespace logitcal;

namespace {

// Tolerances and budgets.
constexpr double kEceTol = 1e-12;
constexpr double kAucTol = 1e-9;
constexpr double kSumTol = 1e-9;
constexpr double kUniformTol = 1e-3;
constexpr double kFpDrop = 0.05;
constexpr double kAucBand = 0.02;
constexpr double kTsRel = 0.02;
constexpr double kFilterTol = 1e-12;
constexpr double kBudget1 = 5.0, kBudget2 = 5.0, kBudget4 = 30.0, kBudget6 = 10.0;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

int failures = 0;

void run(int id, const char* name, double budget, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0 && secs > budget) o.require(false, "over time budget");
    if (!o.pass) ++failures;
    std::printf("criterion %d %-34s %s  (%.2fs)%s%s\n", id, name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome ece_oracle() {
    Outcome o;
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int ms[] = {1, 2, 5, 10};
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + rng() % 50;
        int m = ms[t % 4];
        std::vector<double> c(n);
        std::vector<bool> ok(n);
        for (std::size_t i = 0; i < n; ++i) {
            // some confidences sit exactly on bin edges
            c[i] = rng() % 5 == 0 ? static_cast<double>(rng() % (m + 1)) / m : u(rng);
            ok[i] = u(rng) < 0.6;
        }
        worst = std::max(worst, std::abs(ece(c, ok, m) - oracle::ece(c, ok, m)));
    }
    o.require(worst <= kEceTol, fmt("max |diff| %.3g", worst));
    if (o.pass) o.detail = fmt("200 instances, max |diff| %.3g", worst);
    return o;
}

Outcome pr_oracle() {
    Outcome o;
    std::mt19937_64 rng(2002);
    double worst = 0.0;
    std::size_t curves = 0;
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 1 + rng() % 30;
        std::vector<ScoredDetection> v;
        std::vector<oracle::Det> d;
        for (std::size_t i = 0; i < n; ++i) {
            ScoredDetection s;
            s.confidence = static_cast<double>(rng() % 16) / 15.0;
            int truth = static_cast<int>(rng() % 4) - 1;
            s.predicted_class = rng() % 3 == 0 ? static_cast<int>(rng() % 3) : std::max(truth, 0);
            s.match = truth < 0 ? Match::fp() : Match::tp(truth);
            v.push_back(s);
            d.push_back({s.confidence, s.predicted_class, truth});
        }
        for (int c = 0; c < 3; ++c) {
            auto curve = pr_curve(v, c);
            auto want = oracle::pr_points(d, c);
            o.require(curve.points.size() == want.size(), "point count differs");
            if (curve.points.size() != want.size()) return o;
            for (std::size_t i = 0; i < want.size(); ++i) {
                const auto& p = curve.points[i];
                o.require(p.threshold == want[i].threshold && p.tp == want[i].tp && p.fp == want[i].fp &&
                              p.recall == want[i].recall && p.precision == want[i].precision,
                          "point differs from recount");
            }
            worst = std::max(worst, std::abs(curve.auc - oracle::pr_area(want)));
            ++curves;
        }
    }
    o.require(worst <= kAucTol, fmt("AUC max |diff| %.3g", worst));
    if (o.pass) o.detail = fmt("%.0f curves exact, AUC max |diff| %.3g", static_cast<double>(curves), worst);
    return o;
}

Outcome normalization() {
    Outcome o;
    std::mt19937_64 rng(3003);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto check = [&](const std::vector<double>& v, const char* what) {
        double s = std::accumulate(v.begin(), v.end(), 0.0);
        bool in = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
        o.require(std::abs(s - 1.0) <= kSumTol && in, what);
    };
    for (int i = 0; i < 10000; ++i) {
        std::size_t k = 2 + rng() % 8;
        std::vector<double> l(k), p(k), z(k);
        for (std::size_t j = 0; j < k; ++j) {
            l[j] = u(rng) < 0.25 ? 0.0 : u(rng);
            p[j] = u(rng) * 2.0;
            z[j] = (u(rng) - 0.5) * 60.0;
        }
        double lambda = std::pow(10.0, -9.0 + 9.0 * u(rng));
        check(ml_layer(l, lambda), "ml_layer not normalized");
        check(map_layer(l, p, lambda), "map_layer not normalized");
        check(softmax_ts(z, std::pow(10.0, -2.0 + 4.0 * u(rng))), "softmax_ts not normalized");
    }
    std::vector<double> l{0.9, 0.05, 0.0, 0.05}, p{3.0, 0.1, 1.0, 0.5};
    for (double x : ml_layer(l, 1e4)) o.require(std::abs(x - 0.25) <= kUniformTol, "ml_layer not uniform at lambda=1e4");
    for (double x : map_layer(l, p, 1e4)) o.require(std::abs(x - 0.25) <= kUniformTol, "map_layer not uniform at lambda=1e4");
    std::vector<double> z{0.3, 2.0, -1.5, 1.1};
    for (double x : softmax_ts(z, 1e3)) o.require(std::abs(x - 0.25) <= kUniformTol, "softmax not uniform at TS=1e3");
    o.require(std::abs(softmax_ts(z, 1e-3)[1] - 1.0) <= kUniformTol, "softmax not one-hot at TS=1e-3");
    if (o.pass) o.detail = "3 x 10000 calls";
    return o;
}

struct Benchmark {
    std::vector<ScoredDetection> sg, ml, map;
};

// The synthetic benchmark: train on the default spec, test on the same spec with the
// next seed, scored with the rgb preset.
const Benchmark& benchmark() {
    static const Benchmark b = [] {
        SyntheticSpec spec;
        auto train = training_from_detections(generate_synthetic(spec).records);
        spec.seed += 1;
        auto test = generate_synthetic(spec).records;
        const auto& rgb = PresetRegistry().find("rgb");
        Benchmark out;
        ScoringConfig sg;
        sg.method = Method::sg;
        out.sg = score_all(test, nullptr, sg);
        auto ml_cfg = rgb.config(Method::ml);
        auto ml_model = fit_model(train, ml_cfg.bins);
        out.ml = score_all(test, &ml_model, ml_cfg);
        auto map_cfg = rgb.config(Method::map);
        auto map_model = fit_model(train, map_cfg.bins);
        out.map = score_all(test, &map_model, map_cfg);
        return out;
    }();
    return b;
}

Outcome mechanism() {
    Outcome o;
    const auto& b = benchmark();
    double sg_fp = score_stats(b.sg, Population::fp)->mean;
    std::string detail = fmt("FP mean SG %.3f", sg_fp);
    double worst_band = 0.0;
    for (auto [name, v] : {std::pair{"ML", &b.ml}, std::pair{"MAP", &b.map}}) {
        double fp = score_stats(*v, Population::fp)->mean;
        detail += std::string(", ") + name + fmt(" %.3f", fp);
        o.require(sg_fp - fp >= kFpDrop, std::string(name) + fmt(" FP mean drop %.3f < 0.05", sg_fp - fp));
        for (int c = 0; c < 3; ++c) {
            double band = std::abs(pr_curve(*v, c).auc - pr_curve(b.sg, c).auc);
            worst_band = std::max(worst_band, band);
            o.require(band <= kAucBand, std::string(name) + fmt(" class %.0f AUC off by %.4f", c, band));
        }
    }
    if (o.pass) o.detail = detail + fmt("; max per-class AUC gap %.4f", worst_band);
    return o;
}

Outcome ece_direction() {
    Outcome o;
    const auto& b = benchmark();
    double e_sg = ece(b.sg, 10), e_ml = ece(b.ml, 10);
    o.require(e_ml <= e_sg, fmt("ECE ML %.4f > SG %.4f", e_ml, e_sg));
    if (o.pass) o.detail = fmt("ECE SG %.4f, ML %.4f, MAP %.4f", e_sg, e_ml, ece(b.map, 10));
    return o;
}

Outcome temperature_recovery() {
    Outcome o;
    // logits = log of the true posteriors, labels drawn from those posteriors
    std::mt19937_64 rng(6006);
    std::gamma_distribution<double> g(0.7, 1.0);
    const std::size_t n = 6000;
    std::vector<std::vector<double>> base;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> p(3);
        for (auto& x : p) x = g(rng) + 1e-3;
        double s = std::accumulate(p.begin(), p.end(), 0.0);
        std::vector<double> z;
        for (auto& x : p) z.push_back(std::log(x / s));
        for (auto& x : p) x /= s;
        std::discrete_distribution<int> pick(p.begin(), p.end());
        labels.push_back(pick(rng));
        base.push_back(z);
    }
    std::string detail;
    for (double s : {0.5, 1.0, 1.82, 2.0}) {
        std::vector<DetectionRecord> recs(n);
        std::vector<std::vector<double>> scaled(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (double x : base[i]) scaled[i].push_back(s * x);
            recs[i].logits = scaled[i];
            recs[i].match = Match::tp(labels[i]);
        }
        double t = fit_temperature(recs).temperature;
        double grid = oracle::grid_temperature(scaled, labels, 0.5, 3.0, 0.001);
        o.require(std::abs(t - s) <= kTsRel * s, fmt("s=%.2f: TS*=%.4f", s, t));
        o.require(std::abs(t - grid) <= 0.0015 * s, fmt("s=%.2f: TS*=%.4f, grid %.3f", s, t, grid));
        detail += fmt(" %.2f->%.4f", s, t);
    }
    if (o.pass) o.detail = "s->TS*:" + detail;
    return o;
}

Outcome bilateral() {
    Outcome o;
    SparseMap constant(40, 20);
    for (int y = 0; y < 20; y += 3)
        for (int x = 0; x < 40; x += 4) constant.set(x, y, 3.75);
    auto c = bilateral_upsample(constant);
    for (std::size_t i = 0; i < c.size(); ++i)
        o.require(c.occupancy()[i] && c.values()[i] == 3.75, "constant not reproduced");

    SparseMap single(13, 13);
    single.set(1, 11, 9.5);
    auto s = bilateral_upsample(single);
    o.require(s.at(6, 6) == 9.5, "single neighbour value changed");

    // 3x3 mask: neighbours at distance 1 and sqrt 2, values 2 and 5, empty centre (r0 = 3.5)
    SparseMap h(3, 3);
    h.set(2, 1, 2.0);
    h.set(2, 2, 5.0);
    auto r = bilateral_upsample(h, {3, true, 1});
    double w1 = 1.0 / 2.0 / 2.5, w2 = 1.0 / (1.0 + std::sqrt(2.0)) / 2.5;
    o.require(std::abs(*r.at(1, 1) - (2 * w1 + 5 * w2) / (w1 + w2)) <= kFilterTol, "3x3 case A");
    SparseMap k(3, 3);
    k.set(0, 1, 2.0);
    k.set(2, 1, 4.0);
    auto q = bilateral_upsample(k, {3, true, 1});
    o.require(std::abs(*q.at(1, 1) - 3.0) <= kFilterTol, "3x3 case B");

    o.require(BilateralOptions{}.mask_size == 13 && kDefaultMaskSize == 13, "default mask is not 13");
    SparseMap line(30, 1);
    line.set(0, 0, 1.0);
    auto d = bilateral_upsample(line);
    o.require(d.occupied(6, 0) && !d.occupied(7, 0), "default window is not 13 wide");
    if (o.pass) o.detail = "constant, single neighbour, 3x3 by hand, 13x13 default";
    return o;
}

Outcome map_composition() {
    Outcome o;
    SyntheticSpec spec;
    spec.n_tp = 900;
    spec.n_fp = 300;
    auto model = fit_model(training_from_detections(generate_synthetic(spec).records), 24);
    std::mt19937_64 rng(8008);
    std::normal_distribution<double> z(2.0, 3.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        DetectionRecord r;
        r.logits = {z(rng), z(rng), z(rng)};
        r.objectness = u(rng);
        ScoringConfig cfg;
        cfg.method = Method::map;
        cfg.lambda = std::pow(10.0, -8.0 + 6.0 * u(rng));
        auto got = score_detection(r, &model, cfg);
        auto want = map_layer(lookup_likelihood(model, r.logits), eval_prior(model, r.logits), cfg.lambda);
        for (auto& x : want) x *= r.objectness;
        o.require(got.class_scores == want, "class scores differ");
        o.require(got.confidence == want[argmax(want)], "confidence differs");
    }
    if (o.pass) o.detail = "1000 records bitwise";
    return o;
}

Outcome round_trips() {
    Outcome o;
    TempDir dir;
    SyntheticSpec spec;
    spec.n_tp = 500;
    spec.n_fp = 500;
    auto dump = generate_synthetic(spec);
    for (auto f : {DumpFormat::csv, DumpFormat::jsonl}) {
        std::ostringstream a;
        write_detections(a, dump, f);
        std::istringstream in(a.str());
        std::ostringstream b;
        write_detections(b, read_detections(in, f), f);
        o.require(a.str() == b.str(), f == DumpFormat::csv ? "csv dump not byte-stable" : "jsonl dump not byte-stable");
    }

    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> u(0.0, 80.0);
    SparseMap m(64, 48);
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 64; ++x)
            if (rng() % 3 == 0) m.set(x, y, u(rng));
    write_map(m, dir / "a.pgm", MapFormat::pgm16);
    auto back = read_map(dir / "a.pgm", MapFormat::pgm16);
    write_map(back.map, dir / "b.pgm", MapFormat::pgm16, back.range);
    o.require(slurp(dir / "a.pgm") == slurp(dir / "b.pgm"), "pgm16 not byte-stable");
    o.require(slurp(dir / "a.pgm.occ.pgm") == slurp(dir / "b.pgm.occ.pgm"), "occupancy not byte-stable");

    auto train = training_from_detections(dump.records);
    std::ostringstream m1, m2;
    write_model(m1, fit_model(train, 22));
    write_model(m2, fit_model(train, 22));
    o.require(m1.str() == m2.str(), "model refit differs");
    std::istringstream mi(m1.str());
    std::ostringstream m3;
    write_model(m3, read_model(mi));
    o.require(m1.str() == m3.str(), "model json not byte-stable");
    if (o.pass) o.detail = "csv, jsonl, pgm16, model json";
    return o;
}

}  // namespace

int main() {
    run(1, "ECE oracle equivalence", kBudget1, ece_oracle);
    run(2, "PR/AUC oracle equivalence", kBudget2, pr_oracle);
    run(3, "normalization suite", 0, normalization);
    run(4, "mechanism on synthetic benchmark", kBudget4, mechanism);
    run(5, "ECE direction ML vs SG", 0, ece_direction);
    run(6, "temperature recovery", kBudget6, temperature_recovery);
    run(7, "bilateral filter", 0, bilateral);
    run(8, "MAP composition", 0, map_composition);
    run(9, "format round-trips", 0, round_trips);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

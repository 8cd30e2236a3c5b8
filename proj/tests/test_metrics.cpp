#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "logitcal/metrics.hpp"
#include "logitcal/sweep.hpp"
#include "logitcal/synth.hpp"
#include "oracle.hpp"

using namespace logitcal;

namespace {

ScoredDetection det(double score, int pred, int truth, Difficulty d = Difficulty::unknown) {
    ScoredDetection s;
    s.confidence = score;
    s.predicted_class = pred;
    s.match = truth < 0 ? Match::fp() : Match::tp(truth);
    s.difficulty = d;
    return s;
}

std::vector<oracle::Det> to_oracle(const std::vector<ScoredDetection>& v) {
    std::vector<oracle::Det> out;
    for (const auto& s : v) out.push_back({s.confidence, s.predicted_class, s.match.true_class});
    return out;
}

void check_against_oracle(const std::vector<ScoredDetection>& v, int c) {
    auto curve = pr_curve(v, c);
    auto want = oracle::pr_points(to_oracle(v), c);
    REQUIRE(curve.points.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(curve.points[i].threshold == want[i].threshold);
        CHECK(curve.points[i].tp == want[i].tp);
        CHECK(curve.points[i].fp == want[i].fp);
        CHECK(curve.points[i].recall == want[i].recall);
        CHECK(curve.points[i].precision == want[i].precision);
    }
    CHECK(std::abs(curve.auc - oracle::pr_area(want)) <= 1e-9);
}

}  // namespace

TEST_CASE("ece examples") {
    std::vector<double> c(10, 0.8);
    std::vector<bool> ok{true, true, true, true, true, true, true, true, false, false};
    CHECK(ece(c, ok, 10) == doctest::Approx(0.0).epsilon(1e-15));

    std::vector<double> one(5, 1.0);
    CHECK(ece(one, std::vector<bool>(5, false), 1) == 1.0);

    // bin 1 (0, 0.5]: {0.3 correct} -> |1 - 0.3|; bin 2 (0.5, 1]: {0.7 wrong, 0.9 correct} -> |0.5 - 0.8|
    std::vector<double> a{0.3, 0.7, 0.9};
    std::vector<bool> b{true, false, true};
    CHECK(ece(a, b, 2) == doctest::Approx(1.0 / 3.0 * 0.7 + 2.0 / 3.0 * 0.3).epsilon(1e-15));
}

TEST_CASE("ece errors and bin edges") {
    CHECK_THROWS_AS(ece(std::vector<double>{}, {}, 10), std::invalid_argument);
    CHECK_THROWS_AS(ece(std::vector<double>{1.2}, {true}, 10), ValidationError);
    CHECK_THROWS_AS(ece(std::vector<double>{-0.1}, {true}, 10), ValidationError);
    CHECK(ece_bin(0.0, 10) == 1);
    CHECK(ece_bin(0.1, 10) == 1);
    CHECK(ece_bin(0.3, 10) == 3);
    CHECK(ece_bin(0.7, 10) == 7);
    CHECK(ece_bin(std::nextafter(0.3, 1.0), 10) == 4);
    CHECK(ece_bin(1.0, 10) == 10);
    for (int m = 1; m <= 50; ++m)
        for (int k = 0; k <= m; ++k) {
            double x = k / static_cast<double>(m);
            int b = ece_bin(x, m);
            CHECK((x == 0.0 || (x > (b - 1) / static_cast<double>(m) && x <= b / static_cast<double>(m))));
        }
}

TEST_CASE("ece matches the double loop and its invariants") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        std::size_t n = 1 + rng() % 50;
        int m = 1 + static_cast<int>(rng() % 15);
        std::vector<double> c(n);
        std::vector<bool> ok(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = rng() % 7 == 0 ? std::round(u(rng) * m) / m : u(rng);
            ok[i] = u(rng) < c[i];
        }
        double e = ece(c, ok, m);
        CHECK(std::abs(e - oracle::ece(c, ok, m)) <= 1e-12);
        CHECK((e >= 0.0 && e <= 1.0));
        std::size_t total = 0;
        for (const auto& b : reliability_bins(c, ok, m)) total += b.count;
        CHECK(total == n);

        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<double> c2;
        std::vector<bool> ok2;
        for (auto i : idx) {
            c2.push_back(c[i]);
            ok2.push_back(ok[i]);
        }
        CHECK(std::abs(ece(c2, ok2, m) - e) <= 1e-12);
    }
}

TEST_CASE("ece over scored detections uses correctness") {
    std::vector<ScoredDetection> v{det(0.9, 0, 0), det(0.9, 1, 0), det(0.9, 0, -1)};
    // one of three correct at 0.9
    CHECK(ece(v, 10) == doctest::Approx(0.9 - 1.0 / 3.0));
}

TEST_CASE("perfect separation") {
    std::vector<ScoredDetection> v;
    for (int i = 0; i < 5; ++i) v.push_back(det(0.9, 0, 0));
    for (int i = 0; i < 5; ++i) v.push_back(det(0.1, 0, -1));
    auto c = pr_curve(v, 0);
    REQUIRE(c.points.size() == 2);
    CHECK(c.points[0].recall == 1.0);
    CHECK(c.points[0].precision == 1.0);
    CHECK(c.auc == 1.0);
}

TEST_CASE("one TP below one FP") {
    std::vector<ScoredDetection> v{det(0.4, 0, 0), det(0.6, 0, -1)};
    auto c = pr_curve(v, 0);
    REQUIRE(c.points.size() == 2);
    CHECK(c.points[0].recall == 0.0);
    CHECK(c.points[0].precision == 0.0);
    CHECK(c.points.back().recall == 1.0);
    CHECK(c.points.back().precision == 0.5);
    CHECK(c.auc == doctest::Approx(0.25));
}

TEST_CASE("six-detection instance") {
    std::vector<ScoredDetection> v{det(0.95, 0, 0), det(0.9, 0, -1), det(0.8, 0, 0),
                                   det(0.8, 0, -1), det(0.5, 1, 0),  det(0.3, 0, 0)};
    check_against_oracle(v, 0);
    auto c = pr_curve(v, 0);
    CHECK(c.total_positives == 4);
    CHECK(c.points.size() == 4);
    CHECK(c.points.back().recall == 0.75);
}

TEST_CASE("random curves match recounting and quadrature") {
    std::mt19937_64 rng(123);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = 1 + rng() % 30;
        std::vector<ScoredDetection> v;
        for (std::size_t i = 0; i < n; ++i) {
            double s = static_cast<double>(rng() % 12) / 11.0;
            int truth = static_cast<int>(rng() % 4) - 1;
            int pred = rng() % 4 == 0 ? static_cast<int>(rng() % 3) : std::max(truth, 0);
            v.push_back(det(s, pred, truth));
        }
        for (int c = 0; c < 3; ++c) {
            check_against_oracle(v, c);
            auto curve = pr_curve(v, c);
            for (std::size_t i = 0; i < curve.points.size(); ++i) {
                CHECK((curve.points[i].recall >= 0 && curve.points[i].recall <= 1));
                CHECK((curve.points[i].precision >= 0 && curve.points[i].precision <= 1));
                if (i > 0) CHECK(curve.points[i].recall >= curve.points[i - 1].recall);
            }
        }
    }
}

TEST_CASE("raising a TP score never lowers AUC") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<ScoredDetection> v;
        for (int i = 0; i < 20; ++i) v.push_back(det(u(rng), 0, u(rng) < 0.5 ? 0 : -1));
        double before = pr_curve(v, 0).auc;
        std::vector<std::size_t> tps;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i].match.is_tp()) tps.push_back(i);
        if (tps.empty()) continue;
        auto& s = v[tps[rng() % tps.size()]];
        s.confidence = s.confidence + (1.0 - s.confidence) * u(rng);
        CHECK(pr_curve(v, 0).auc >= before - 1e-12);
    }
}

TEST_CASE("permutation leaves curves unchanged") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ScoredDetection> v;
    for (int i = 0; i < 40; ++i) v.push_back(det(std::round(u(rng) * 10) / 10, static_cast<int>(rng() % 2),
                                                 static_cast<int>(rng() % 3) - 1));
    auto a = pr_curve(v, 1);
    std::shuffle(v.begin(), v.end(), rng);
    auto b = pr_curve(v, 1);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].precision == b.points[i].precision);
    CHECK(a.auc == b.auc);
}

TEST_CASE("difficulty tier filter") {
    std::vector<ScoredDetection> v{det(0.9, 0, 0, Difficulty::easy), det(0.8, 0, -1, Difficulty::hard),
                                   det(0.7, 0, 0, Difficulty::hard), det(0.6, 1, 0, Difficulty::easy)};
    auto easy = pr_curve(v, 0, Difficulty::easy);
    CHECK(easy.total_positives == 2);
    REQUIRE(easy.points.size() == 1);
    CHECK(easy.points[0].recall == 0.5);
    auto hard = pr_curve(v, 0, Difficulty::hard);
    CHECK(hard.total_positives == 1);
    CHECK(hard.points.back().precision == 0.5);
}

TEST_CASE("no positives gives a diagnostic") {
    std::vector<ScoredDetection> v{det(0.9, 0, -1)};
    auto c = pr_curve(v, 0);
    CHECK(c.empty());
    CHECK_FALSE(c.diagnostic.empty());
    CHECK(c.auc == 0.0);
}

TEST_CASE("auc on constructed curves") {
    PrCurve flat;
    flat.points = {{0.9, 1, 0, 0.5, 1.0}, {0.5, 2, 0, 1.0, 1.0}};
    CHECK(auc(flat) == 1.0);
    PrCurve half;
    half.points = {{0.9, 1, 1, 0.25, 0.5}, {0.5, 4, 4, 1.0, 0.5}};
    CHECK(auc(half) == 0.5);
    PrCurve three;
    three.points = {{0.9, 1, 0, 0.2, 1.0}, {0.6, 3, 2, 0.6, 0.6}, {0.2, 5, 5, 1.0, 0.5}};
    std::vector<oracle::Point> pts{{0.9, 0.2, 1.0, 1, 0}, {0.6, 0.6, 0.6, 3, 2}, {0.2, 1.0, 0.5, 5, 5}};
    CHECK(std::abs(auc(three) - oracle::pr_area(pts)) <= 1e-12);
    CHECK(auc(PrCurve{}) == 0.0);
}

TEST_CASE("score statistics") {
    std::vector<ScoredDetection> v{det(0.5, 0, -1), det(0.5, 0, -1), det(0.0, 0, 0), det(1.0, 0, 0)};
    auto fp = score_stats(v, Population::fp);
    REQUIRE(fp);
    CHECK(fp->mean == 0.5);
    CHECK(fp->variance == 0.0);
    auto tp = score_stats(v, Population::tp);
    REQUIRE(tp);
    CHECK(tp->mean == 0.5);
    CHECK(tp->variance == 0.25);
    CHECK_FALSE(score_stats(std::vector<ScoredDetection>{det(0.3, 0, 0)}, Population::fp));
}

TEST_CASE("sweep") {
    SyntheticSpec spec;
    spec.n_tp = 600;
    spec.n_fp = 600;
    DatasetSplit split;
    split.train = training_from_detections(generate_synthetic(spec).records);
    spec.seed = 43;
    split.test = generate_synthetic(spec).records;
    ScoringConfig base;
    base.method = Method::ml;

    std::vector<double> l1{1.6e-6};
    std::vector<int> b1{22};
    auto one = sweep(split, l1, b1, base);
    REQUIRE(one.size() == 1);
    auto cfg = base;
    cfg.lambda = 1.6e-6;
    cfg.bins = 22;
    auto direct = evaluate_cell(split, cfg, 10);
    CHECK(one[0].ece == direct.ece);
    CHECK(one[0].mean_auc == direct.mean_auc);
    CHECK(std::isfinite(one[0].ece));
    CHECK(std::isfinite(one[0].mean_auc));
    CHECK(one[0].error.empty());

    std::vector<double> l2{1e-6, 1e-3};
    std::vector<int> b2{10, 22};
    auto four = sweep(split, l2, b2, base);
    REQUIRE(four.size() == 4);
    CHECK(four[1].lambda == 1e-6);
    CHECK(four[1].bins == 22);
    CHECK(four[2].lambda == 1e-3);
    CHECK(four[2].bins == 10);

    std::vector<double> zero{0.0};
    std::vector<int> many{200};
    auto bad = sweep(split, zero, many, base);
    REQUIRE(bad.size() == 1);
    CHECK_FALSE(bad[0].error.empty());
    CHECK(std::isnan(bad[0].ece));
}

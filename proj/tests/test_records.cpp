#include <doctest.h>

#include <random>
#include <sstream>

#include "logitcal/dump_io.hpp"
#include "logitcal/records.hpp"

using namespace logitcal;

namespace {

DetectionDump read_csv(const std::string& text) {
    std::istringstream in(text);
    return read_detections(in, DumpFormat::csv);
}

std::string write(const DetectionDump& d, DumpFormat fmt) {
    std::ostringstream out;
    write_detections(out, d, fmt);
    return out.str();
}

DetectionDump random_dump(std::uint64_t seed, std::size_t n, std::size_t k) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 3.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DetectionDump d;
    d.num_classes = k;
    for (std::size_t i = 0; i < n; ++i) {
        DetectionRecord r;
        r.frame_id = "f" + std::to_string(i / 4);
        r.det_id = static_cast<long long>(i);
        for (std::size_t j = 0; j < k; ++j) r.logits.push_back(z(rng));
        r.objectness = u(rng);
        r.match = u(rng) < 0.5 ? Match::fp() : Match::tp(static_cast<int>(rng() % k));
        r.difficulty = static_cast<Difficulty>(rng() % 4);
        d.records.push_back(r);
    }
    return d;
}

}  // namespace

TEST_CASE("csv row maps onto a record") {
    auto d = read_csv("logit_0,logit_1,logit_2,objectness,match,difficulty\n1.2,-0.3,0.1,0.9,TP:0,easy\n");
    REQUIRE(d.records.size() == 1);
    const auto& r = d.records[0];
    CHECK(d.num_classes == 3);
    CHECK(r.logits == std::vector<double>{1.2, -0.3, 0.1});
    CHECK(r.objectness == 0.9);
    CHECK(r.match == Match::tp(0));
    CHECK(r.difficulty == Difficulty::easy);
    CHECK(r.det_id == 0);
}

TEST_CASE("header only gives no records") {
    auto d = read_csv("logit_0,logit_1,logit_2,objectness,match,difficulty\n");
    CHECK(d.records.empty());
    CHECK(d.num_classes == 3);
}

TEST_CASE("objectness above one is rejected") {
    CHECK_THROWS_AS(read_csv("logit_0,logit_1,objectness,match\n0,0,1.5,FP\n"), ValidationError);
}

TEST_CASE("malformed rows name their line") {
    try {
        read_csv("#logitcal-dump,version=1\nlogit_0,logit_1,match\n0,0,FP\n0,FP\n");
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(read_csv("logit_0,logit_1,match\n0,abc,FP\n"), ParseError);
    CHECK_THROWS_AS(read_csv("logit_0,logit_1,match\n0,inf,FP\n"), std::runtime_error);
    CHECK_THROWS_AS(read_csv("logit_0,logit_1,match\n0,1,TP:2\n"), ValidationError);
    CHECK_THROWS_AS(read_csv("logit_0,logit_2,match\n0,1,FP\n"), SchemaError);
}

TEST_CASE("jsonl records must agree on K") {
    std::istringstream in(
        R"({"format":"logitcal-dump","kind":"detections","version":1,"num_classes":2})" "\n"
        R"({"logits":[0,1],"match":"FP"})" "\n"
        R"({"logits":[0,1,2],"match":"FP"})" "\n");
    CHECK_THROWS_AS(read_detections(in, DumpFormat::jsonl), SchemaError);
}

TEST_CASE("match and difficulty spellings") {
    CHECK(parse_match("TP:3") == Match::tp(3));
    CHECK(parse_match("FP") == Match::fp());
    CHECK(to_string(Match::tp(2)) == "TP:2");
    CHECK_THROWS(parse_match("TP:"));
    CHECK_THROWS(parse_match("TP:-1"));
    CHECK(parse_difficulty("moderate") == Difficulty::moderate);
    CHECK_THROWS(parse_difficulty("medium"));
}

TEST_CASE("dump round trip is field-for-field and byte-stable") {
    for (auto fmt : {DumpFormat::csv, DumpFormat::jsonl}) {
        auto d = random_dump(11, 200, 4);
        ScoreColumn col{"ml", {}, {}};
        for (std::size_t i = 0; i < d.records.size(); ++i) {
            col.score.push_back(1.0 / static_cast<double>(i + 3));
            col.pred_class.push_back(static_cast<int>(i % 4));
        }
        d.set_scores(col);
        auto text = write(d, fmt);
        std::istringstream in(text);
        auto back = read_detections(in, fmt);
        REQUIRE(back.records.size() == d.records.size());
        for (std::size_t i = 0; i < d.records.size(); ++i) {
            const auto& a = d.records[i];
            const auto& b = back.records[i];
            CHECK(a.frame_id == b.frame_id);
            CHECK(a.det_id == b.det_id);
            CHECK(a.match == b.match);
            CHECK(a.difficulty == b.difficulty);
            for (std::size_t j = 0; j < a.logits.size(); ++j)
                CHECK(b.logits[j] == doctest::Approx(a.logits[j]).epsilon(1e-8));
        }
        REQUIRE(back.find_scores("ml"));
        CHECK(back.find_scores("ml")->pred_class == col.pred_class);
        CHECK(write(back, fmt) == text);
    }
}

TEST_CASE("training dumps accept true_class or match") {
    std::istringstream a("logit_0,logit_1,true_class\n1,0,0\n0,1,1\n");
    auto ta = read_training(a, DumpFormat::csv);
    REQUIRE(ta.size() == 2);
    CHECK(ta[1].true_class == 1);

    std::istringstream b("logit_0,logit_1,match\n1,0,TP:0\n5,5,FP\n0,1,TP:1\n");
    auto tb = read_training(b, DumpFormat::csv);
    REQUIRE(tb.size() == 2);
    CHECK(tb[0].logits == ta[0].logits);
    CHECK(tb[1].true_class == 1);

    std::ostringstream out;
    write_training(out, ta, DumpFormat::jsonl);
    std::istringstream back(out.str());
    auto tc = read_training(back, DumpFormat::jsonl);
    REQUIRE(tc.size() == 2);
    CHECK(tc[0].logits == ta[0].logits);
}

TEST_CASE("validate_split") {
    DatasetSplit s;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 30; ++i) s.train.push_back({{c == 0 ? 1.0 * i : 0.0, c == 1 ? 1.0 * i : 0.0}, c});
    CHECK(validate_split(s, 22).empty());

    s.train.erase(s.train.begin() + 3, s.train.begin() + 30);
    auto d = validate_split(s, 22);
    REQUIRE(d.size() == 1);
    CHECK(d[0].severity == Severity::warning);
    CHECK(d[0].message.find("sparse class 0") != std::string::npos);

    DetectionRecord r;
    r.logits = {0, 0, 0};
    s.test.push_back(r);
    bool error = false;
    for (const auto& x : validate_split(s, 22)) error |= x.severity == Severity::error;
    CHECK(error);
}

TEST_CASE("argmax ties go to the lowest index") {
    CHECK(argmax({0.2, 0.5, 0.5}) == 1);
    CHECK(argmax({1, 1, 1}) == 0);
}

TEST_CASE("training_from_detections keeps TPs in order") {
    auto d = random_dump(5, 50, 3);
    auto t = training_from_detections(d.records);
    std::size_t j = 0;
    for (const auto& r : d.records) {
        if (!r.match.is_tp()) continue;
        REQUIRE(j < t.size());
        CHECK(t[j].logits == r.logits);
        CHECK(t[j].true_class == r.match.true_class);
        ++j;
    }
    CHECK(j == t.size());
}

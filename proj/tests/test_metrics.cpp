#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "curvecv/error.hpp"
#include "curvecv/metrics.hpp"
#include "curvecv/rng.hpp"
#include "testutil.hpp"

using namespace curvecv;

namespace {

// Independent oracle: per-class TP/FP/FN pooled over all classes, then
// the harmonic mean. Counts positions directly, never touching the
// ConfusionMatrix type.
double oracle_micro_f1(const std::vector<std::string>& gold,
                       const std::vector<std::string>& pred) {
    std::map<std::string, long> tp, fp, fn;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == pred[i]) {
            tp[gold[i]] += 1;
        } else {
            fp[pred[i]] += 1;
            fn[gold[i]] += 1;
        }
    }
    long TP = 0, FP = 0, FN = 0;
    for (const auto& [l, c] : tp) TP += c;
    for (const auto& [l, c] : fp) FP += c;
    for (const auto& [l, c] : fn) FN += c;
    if (TP + FP == 0 || TP + FN == 0) return 0.0;
    double p = double(TP) / double(TP + FP);
    double r = double(TP) / double(TP + FN);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

double oracle_accuracy(const std::vector<std::string>& gold,
                       const std::vector<std::string>& pred) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == pred[i]) ++hits;
    }
    return double(hits) / double(gold.size());
}

} // namespace

TEST_CASE("confusion counts by hand: gold=[A,A,B], pred=[A,B,B]") {
    auto schema = cvtest::binary_schema();
    auto cm = confusion({"A", "A", "B"}, {"A", "B", "B"}, schema);
    CHECK(cm.at(0, 0) == 1);  // (A,A)
    CHECK(cm.at(0, 1) == 1);  // (A,B)
    CHECK(cm.at(1, 1) == 1);  // (B,B)
    CHECK(cm.at(1, 0) == 0);
    CHECK(cm.total() == 3);
}

TEST_CASE("identical lists give a diagonal matrix") {
    auto schema = cvtest::abc_schema();
    std::vector<std::string> labels = {"A", "B", "C", "B", "A"};
    auto cm = confusion(labels, labels, schema);
    for (int g = 0; g < 3; ++g) {
        for (int p = 0; p < 3; ++p) {
            if (g != p) CHECK(cm.at(g, p) == 0);
        }
    }
    CHECK(cm.total() == 5);
}

TEST_CASE("empty lists give an all-zero matrix") {
    auto cm = confusion({}, {}, cvtest::abc_schema());
    CHECK(cm.total() == 0);
}

TEST_CASE("confusion rejects length mismatch and unknown labels") {
    auto schema = cvtest::binary_schema();
    CHECK_THROWS_AS(confusion({"A"}, {"A", "B"}, schema), ValidationError);
    CHECK_THROWS_AS(confusion({"Z"}, {"A"}, schema), ValidationError);
    CHECK_THROWS_AS(confusion({"A"}, {"Z"}, schema), ValidationError);
}

TEST_CASE("always-majority predictor scores binary-F1 exactly 0.0") {
    auto schema = builtin_schema("smm4h-task5");
    std::vector<std::string> gold, pred;
    for (int i = 0; i < 200; ++i) {
        gold.push_back(i < 40 ? "potential" : "Other");
        pred.push_back("Other");
    }
    auto score = binary_f1(confusion(gold, pred, schema), "potential");
    CHECK(score.value == 0.0);
    CHECK(score.support == 40);
}

TEST_CASE("perfect predictions with positives score 1.0") {
    auto schema = cvtest::binary_schema();
    std::vector<std::string> labels = {"A", "B", "A", "B", "A"};
    auto score = binary_f1(confusion(labels, labels, schema), "A");
    CHECK(score.value == 1.0);
}

TEST_CASE("TP=2 FP=1 FN=1 gives P=R=F1=2/3") {
    auto schema = cvtest::binary_schema();
    // gold:  A A A B B  -> two TP (A,A), one FN (A->B), one FP (B->A)
    std::vector<std::string> gold = {"A", "A", "A", "B", "B"};
    std::vector<std::string> pred = {"A", "A", "B", "A", "B"};
    auto score = binary_f1(confusion(gold, pred, schema), "A");
    CHECK(score.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("binary_f1 rejects a positive label outside the schema") {
    auto cm = confusion({"A"}, {"A"}, cvtest::binary_schema());
    CHECK_THROWS_AS(binary_f1(cm, "nope"), ValidationError);
}

TEST_CASE("micro_f1 on gold=[a,a,b], pred=[a,b,b] is 2/3") {
    auto schema = cvtest::binary_schema();
    std::vector<std::string> gold = {"A", "A", "B"};
    std::vector<std::string> pred = {"A", "B", "B"};
    auto score = micro_f1(confusion(gold, pred, schema));
    // pooled TP=2, FP=1, FN=1
    CHECK(score.value == doctest::Approx(oracle_micro_f1(gold, pred)).epsilon(1e-12));
    CHECK(score.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(score.support == 3);
}

TEST_CASE("micro_f1 is 1.0 when everything is correct") {
    auto schema = cvtest::abc_schema();
    std::vector<std::string> labels = {"A", "B", "C", "C"};
    CHECK(micro_f1(confusion(labels, labels, schema)).value == 1.0);
}

TEST_CASE("micro_f1 rejects an empty matrix") {
    auto cm = confusion({}, {}, cvtest::abc_schema());
    CHECK_THROWS_AS(micro_f1(cm), ValidationError);
}

TEST_CASE("micro_f1 equals accuracy and the pooling oracle on random inputs") {
    auto schema = cvtest::abc_schema();
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.next_below(200);
        std::vector<std::string> gold, pred;
        for (std::size_t i = 0; i < n; ++i) {
            gold.push_back(schema.labels[rng.next_below(3)]);
            pred.push_back(schema.labels[rng.next_below(3)]);
        }
        double value = micro_f1(confusion(gold, pred, schema)).value;
        CHECK(value == oracle_accuracy(gold, pred));  // exact: same division
        CHECK(std::abs(value - oracle_micro_f1(gold, pred)) <= 1e-12);
    }
}

TEST_CASE("scores are invariant under joint permutation of (gold, pred)") {
    auto schema = cvtest::binary_schema();
    SplitMix64 rng(501);
    std::vector<std::string> gold, pred;
    for (int i = 0; i < 97; ++i) {
        gold.push_back(schema.labels[rng.next_below(2)]);
        pred.push_back(schema.labels[rng.next_below(2)]);
    }
    double micro_before = micro_f1(confusion(gold, pred, schema)).value;
    double binary_before = binary_f1(confusion(gold, pred, schema), "A").value;

    std::vector<std::size_t> perm(gold.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    seeded_shuffle(perm, 8);
    std::vector<std::string> gold2(gold.size()), pred2(pred.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        gold2[i] = gold[perm[i]];
        pred2[i] = pred[perm[i]];
    }
    CHECK(micro_f1(confusion(gold2, pred2, schema)).value == micro_before);
    CHECK(binary_f1(confusion(gold2, pred2, schema), "A").value == binary_before);
}

TEST_CASE("micro_f1 is symmetric under bijective relabeling") {
    auto schema = cvtest::abc_schema();
    TaskSchema swapped = schema;
    // relabel A<->C
    auto rename = [](const std::string& l) {
        if (l == "A") return std::string("C");
        if (l == "C") return std::string("A");
        return l;
    };
    SplitMix64 rng(66);
    std::vector<std::string> gold, pred, gold2, pred2;
    for (int i = 0; i < 150; ++i) {
        gold.push_back(schema.labels[rng.next_below(3)]);
        pred.push_back(schema.labels[rng.next_below(3)]);
        gold2.push_back(rename(gold.back()));
        pred2.push_back(rename(pred.back()));
    }
    CHECK(micro_f1(confusion(gold, pred, schema)).value ==
          micro_f1(confusion(gold2, pred2, swapped)).value);
}

TEST_CASE("binary F1 stays within [0,1] and matches its defining identity") {
    auto schema = cvtest::binary_schema();
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.next_below(80);
        std::vector<std::string> gold, pred;
        for (std::size_t i = 0; i < n; ++i) {
            gold.push_back(schema.labels[rng.next_below(2)]);
            pred.push_back(schema.labels[rng.next_below(2)]);
        }
        auto cm = confusion(gold, pred, schema);
        double f1 = binary_f1(cm, "A").value;
        CHECK(f1 >= 0.0);
        CHECK(f1 <= 1.0);

        // recompute 2PR/(P+R) directly from the matrix
        double tp = double(cm.at(0, 0)), fp = double(cm.at(1, 0)), fn = double(cm.at(0, 1));
        if (tp + fp > 0 && tp + fn > 0) {
            double p = tp / (tp + fp), r = tp / (tp + fn);
            double expected = (p + r == 0.0) ? 0.0 : 2 * p * r / (p + r);
            CHECK(f1 == expected);
        } else {
            CHECK(f1 == 0.0);
        }
    }
}

TEST_CASE("majority-degeneracy detection") {
    CHECK(is_majority_degenerate({"Other", "Other", "Other"}, "Other"));
    CHECK_FALSE(is_majority_degenerate({"Other", "potential"}, "Other"));
    CHECK(is_majority_degenerate({}, "Other"));  // vacuous
}

TEST_CASE("report rounding is 4-decimal and stable") {
    CHECK(format_score(0.5) == "0.5000");
    CHECK(format_score(1.0) == "1.0000");
    CHECK(format_score(2.0 / 3.0) == "0.6667");
    CHECK(format_score(0.00004) == "0.0000");

    SplitMix64 rng(4);
    for (int i = 0; i < 200; ++i) {
        double v = double(rng.next_below(1000000)) / 1000000.0;
        double rounded = round_score(v);
        CHECK(round_score(rounded) == rounded);           // idempotent
        CHECK(format_score(rounded) == format_score(v));  // same rendering
        // half the last decimal place, plus representation slack on ties
        CHECK(std::abs(rounded - v) <= 5e-5 * (1 + 1e-9));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "curvecv/error.hpp"
#include "curvecv/folds.hpp"
#include "testutil.hpp"

using namespace curvecv;

namespace {

std::multiset<std::size_t> fold_sizes(const FoldPlan& plan) {
    std::map<int, std::size_t> sizes;
    for (const auto& [id, fold] : plan.assignment) sizes[fold] += 1;
    std::multiset<std::size_t> out;
    for (const auto& [fold, n] : sizes) out.insert(n);
    return out;
}

// Independent re-implementation of the pinned shuffle recipe, written
// from the stated constants rather than by calling the library's RNG.
struct OracleRng {
    unsigned long long state;
    unsigned long long next() {
        state += 0x9e3779b97f4a7c15ULL;
        unsigned long long z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

std::vector<std::string> oracle_shuffled_ids(std::vector<std::string> ids,
                                             unsigned long long seed) {
    std::sort(ids.begin(), ids.end());
    OracleRng rng{seed};
    for (std::size_t i = ids.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next() % i);
        std::swap(ids[i - 1], ids[j]);
    }
    return ids;
}

} // namespace

TEST_CASE("7,174 examples split 5 ways as {1435 x4, 1434}") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 7174);
    FoldPlan plan = make_folds(corpus, 5, 3);
    CHECK(fold_sizes(plan) == std::multiset<std::size_t>{1434, 1435, 1435, 1435, 1435});
}

TEST_CASE("9,452 examples split 5 ways as {1891 x2, 1890 x3}") {
    auto corpus = cvtest::id_corpus(cvtest::abc_schema(), 9452);
    FoldPlan plan = make_folds(corpus, 5, 3);
    CHECK(fold_sizes(plan) == std::multiset<std::size_t>{1890, 1890, 1890, 1891, 1891});
}

TEST_CASE("10 examples, k=5: five folds of exactly 2, any seed") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 10);
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 999999ULL}) {
        FoldPlan plan = make_folds(corpus, 5, seed);
        CHECK(fold_sizes(plan) == std::multiset<std::size_t>{2, 2, 2, 2, 2});
    }
}

TEST_CASE("same (corpus, k, seed) regenerates a byte-identical plan") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 533);
    FoldPlan a = make_folds(corpus, 4, 77);
    FoldPlan b = make_folds(corpus, 4, 77);
    CHECK(a.to_json_string() == b.to_json_string());

    FoldPlan c = make_folds(corpus, 4, 78);
    CHECK(a.to_json_string() != c.to_json_string());
}

TEST_CASE("folds partition the corpus exactly") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 101);
    FoldPlan plan = make_folds(corpus, 5, 9);

    std::set<std::string> seen;
    for (int f = 0; f < plan.k; ++f) {
        for (const auto& ex : held_out(plan, corpus, f)) {
            CHECK(seen.insert(ex.id).second);  // pairwise disjoint
        }
    }
    CHECK(seen.size() == corpus.size());
}

TEST_CASE("train order prefixes nest: size 10 is a prefix of size 50") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 300);
    FoldPlan plan = make_folds(corpus, 5, 11);
    for (int f = 0; f < 5; ++f) {
        auto small = train_subset(plan, corpus, f, 10);
        auto large = train_subset(plan, corpus, f, 50);
        REQUIRE(small.size() == 10);
        REQUIRE(large.size() == 50);
        CHECK(std::equal(small.begin(), small.end(), large.begin()));
    }
}

TEST_CASE("train_subset matches the independently recomputed shuffle") {
    // corpus of 25 ids "0".."24", k=5, seed 7, fold 0, size 5
    Corpus corpus;
    corpus.schema = cvtest::binary_schema();
    std::vector<std::string> ids;
    for (int i = 0; i < 25; ++i) {
        std::string id = std::to_string(i);
        ids.push_back(id);
        corpus.examples.push_back({id, "body " + id, i % 2 ? "A" : "B"});
    }
    FoldPlan plan = make_folds(corpus, 5, 7);

    auto shuffled = oracle_shuffled_ids(ids, 7);
    std::map<std::string, int> oracle_fold;
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        oracle_fold[shuffled[i]] = static_cast<int>(i % 5);
    }
    std::vector<std::string> oracle_train0;
    for (const auto& id : shuffled) {
        if (oracle_fold[id] != 0) oracle_train0.push_back(id);
    }

    auto subset = train_subset(plan, corpus, 0, 5);
    REQUIRE(subset.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(subset[i].id == oracle_train0[i]);
    }
    // And the assignment itself matches the oracle's round-robin slicing.
    for (const auto& [id, fold] : plan.assignment) {
        CHECK(fold == oracle_fold[id]);
    }
}

TEST_CASE("no training subset ever leaks a held-out id") {
    auto corpus = cvtest::id_corpus(cvtest::abc_schema(), 217);
    FoldPlan plan = make_folds(corpus, 7, 5);
    for (int f = 0; f < plan.k; ++f) {
        std::set<std::string> held_ids;
        for (const auto& ex : held_out(plan, corpus, f)) held_ids.insert(ex.id);
        for (std::size_t size : {std::size_t{1}, std::size_t{13}, std::size_t{100},
                                 std::size_t{9999}}) {
            for (const auto& ex : train_subset(plan, corpus, f, size)) {
                CHECK(held_ids.count(ex.id) == 0);
            }
        }
    }
}

TEST_CASE("held_out preserves corpus order and pairs with the train side") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 7174);
    FoldPlan plan = make_folds(corpus, 5, 21);
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
        position[corpus.examples[i].id] = i;
    }
    for (int f = 0; f < 5; ++f) {
        auto held = held_out(plan, corpus, f);
        std::size_t last = 0;
        bool first = true;
        for (const auto& ex : held) {
            std::size_t pos = position[ex.id];
            if (!first) CHECK(pos > last);
            last = pos;
            first = false;
        }
        // |held_out| + |full train side| == corpus size
        CHECK(held.size() + plan.order[static_cast<std::size_t>(f)].size() == 7174);
    }
}

TEST_CASE("oversized requests cap at what the fold offers: 5,739 or 5,740") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 7174);
    FoldPlan plan = make_folds(corpus, 5, 2);
    for (int f = 0; f < 5; ++f) {
        auto subset = train_subset(plan, corpus, f, 8000);
        CHECK((subset.size() == 5739 || subset.size() == 5740));
    }
}

TEST_CASE("bounds and size errors") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 20);
    FoldPlan plan = make_folds(corpus, 5, 1);
    CHECK_THROWS_AS(held_out(plan, corpus, 5), ValidationError);
    CHECK_THROWS_AS(held_out(plan, corpus, -1), ValidationError);
    CHECK_THROWS_AS(train_subset(plan, corpus, 5, 4), ValidationError);
    CHECK_THROWS_AS(train_subset(plan, corpus, 0, 0), ValidationError);
    CHECK_THROWS_AS(make_folds(corpus, 21, 1), ValidationError);
    CHECK_THROWS_AS(make_folds(corpus, 1, 1), ValidationError);
}

TEST_CASE("make_folds rejects duplicate ids") {
    Corpus corpus;
    corpus.schema = cvtest::binary_schema();
    corpus.examples = {{"x", "t1", "A"}, {"y", "t2", "B"}, {"x", "t3", "A"}};
    CHECK_THROWS_AS(make_folds(corpus, 2, 1), ValidationError);
}

TEST_CASE("plan survives a disk round-trip byte-for-byte") {
    auto dir = cvtest::scratch_dir("folds_roundtrip");
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 83);
    FoldPlan plan = make_folds(corpus, 3, 19);
    plan.save(dir / "plan.json");
    FoldPlan loaded = FoldPlan::load(dir / "plan.json");
    CHECK(loaded.to_json_string() == plan.to_json_string());
    CHECK(loaded.fingerprint() == plan.fingerprint());
}

TEST_CASE("plan with a foreign generator is rejected") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 12);
    FoldPlan plan = make_folds(corpus, 2, 1);
    std::string json = plan.to_json_string();
    auto pos = json.find("splitmix64");
    REQUIRE(pos != std::string::npos);
    json.replace(pos, 10, "mt19937_64");
    CHECK_THROWS_AS(FoldPlan::from_json_string(json), ValidationError);
}

TEST_CASE("validate_plan catches plan/corpus drift") {
    auto corpus = cvtest::id_corpus(cvtest::binary_schema(), 30);
    FoldPlan plan = make_folds(corpus, 3, 4);
    validate_plan(plan, corpus);  // no throw

    auto other = cvtest::id_corpus(cvtest::binary_schema(), 30, "z");
    CHECK_THROWS_AS(validate_plan(plan, other), ValidationError);
    auto bigger = cvtest::id_corpus(cvtest::binary_schema(), 31);
    CHECK_THROWS_AS(validate_plan(plan, bigger), ValidationError);
}

TEST_CASE("default schedule is the 16-size list") {
    auto schedule = SubsampleSchedule::default_schedule();
    std::vector<std::size_t> expected = {10,   50,   100,  175,  250,  500,  750,  1000,
                                         1500, 2000, 3000, 4000, 5000, 6000, 7000, 8000};
    CHECK(schedule.sizes == expected);
    schedule.validate();
}

TEST_CASE("schedule parsing and validation") {
    CHECK(SubsampleSchedule::parse("10,50").sizes == std::vector<std::size_t>{10, 50});
    CHECK_THROWS_AS(SubsampleSchedule::parse("50,10"), ValidationError);
    CHECK_THROWS_AS(SubsampleSchedule::parse("10,10"), ValidationError);
    CHECK_THROWS_AS(SubsampleSchedule::parse("0,10"), ValidationError);
    CHECK_THROWS_AS(SubsampleSchedule::parse("ten"), ParseError);
    CHECK_THROWS_AS(SubsampleSchedule{{}}.validate(), ValidationError);
}

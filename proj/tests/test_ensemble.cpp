#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "curvecv/ensemble.hpp"
#include "curvecv/error.hpp"
#include "curvecv/rng.hpp"
#include "testutil.hpp"

using namespace curvecv;

namespace {

// Exhaustive oracle: count votes per label at one position, collect the
// argmax set, apply the tie rule by its written definition.
std::string oracle_vote_position(const std::vector<std::string>& votes,
                                 const TaskSchema& schema, TieRule rule,
                                 const std::string& majority) {
    std::map<std::string, int> counts;
    for (const auto& v : votes) counts[v] += 1;
    int best = 0;
    for (const auto& [l, c] : counts) best = std::max(best, c);
    std::vector<std::string> tied;
    for (const auto& label : schema.labels) {
        auto it = counts.find(label);
        if (it != counts.end() && it->second == best) tied.push_back(label);
    }
    if (tied.size() == 1) return tied[0];
    if (rule == TieRule::train_majority &&
        std::find(tied.begin(), tied.end(), majority) != tied.end()) {
        return majority;
    }
    return tied.front();  // earliest in schema order
}

TaskSchema n_label_schema(std::size_t n) {
    TaskSchema s;
    s.task_id = "vote-test";
    for (std::size_t i = 0; i < n; ++i) s.labels.push_back(std::string(1, char('A' + i)));
    s.primary_metric = Metric::micro_f1;
    return s;
}

} // namespace

TEST_CASE("unanimous members produce that label everywhere") {
    VoteSet votes;
    votes.schema = cvtest::abc_schema();
    votes.members.assign(5, {"B", "A", "C", "B"});
    auto fused = majority_vote(votes);
    CHECK(fused == std::vector<std::string>{"B", "A", "C", "B"});
}

TEST_CASE("[A,A,B,B,C] under schema order (A,B,C) fuses to A") {
    VoteSet votes;
    votes.schema = cvtest::abc_schema();
    votes.members = {{"A"}, {"A"}, {"B"}, {"B"}, {"C"}};
    auto fused = majority_vote(votes);
    CHECK(fused == std::vector<std::string>{"A"});
}

TEST_CASE("train_majority rule prefers the recorded majority among the tied") {
    VoteSet votes;
    votes.schema = cvtest::abc_schema();
    votes.members = {{"A"}, {"A"}, {"B"}, {"B"}, {"C"}};
    votes.tie_rule = TieRule::train_majority;
    votes.train_majority = "B";
    CHECK(majority_vote(votes) == std::vector<std::string>{"B"});

    // majority not among the tied -> schema order wins
    votes.train_majority = "C";
    CHECK(majority_vote(votes) == std::vector<std::string>{"A"});
}

TEST_CASE("five degenerate fold models fuse to the majority class everywhere") {
    auto schema = builtin_schema("smm4h-task5");
    VoteSet votes;
    votes.schema = schema;
    votes.members.assign(5, std::vector<std::string>(100, "Other"));
    auto fused = majority_vote(votes);
    for (const auto& label : fused) CHECK(label == "Other");
}

TEST_CASE("random vote sets match the exhaustive oracle under both rules") {
    SplitMix64 rng(510);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t num_labels = 2 + rng.next_below(4);   // 2..5
        std::size_t num_members = 1 + rng.next_below(7);  // 1..7
        std::size_t positions = 1 + rng.next_below(20);
        auto schema = n_label_schema(num_labels);
        std::string majority = schema.labels[rng.next_below(num_labels)];

        VoteSet votes;
        votes.schema = schema;
        votes.train_majority = majority;
        for (std::size_t m = 0; m < num_members; ++m) {
            std::vector<std::string> member;
            for (std::size_t p = 0; p < positions; ++p) {
                member.push_back(schema.labels[rng.next_below(num_labels)]);
            }
            votes.members.push_back(std::move(member));
        }

        for (TieRule rule : {TieRule::schema_order, TieRule::train_majority}) {
            votes.tie_rule = rule;
            auto fused = majority_vote(votes);
            REQUIRE(fused.size() == positions);
            for (std::size_t p = 0; p < positions; ++p) {
                std::vector<std::string> column;
                for (const auto& member : votes.members) column.push_back(member[p]);
                CHECK(fused[p] == oracle_vote_position(column, schema, rule, majority));
            }
        }
    }
}

TEST_CASE("any label with a strict majority wins under either rule") {
    SplitMix64 rng(77);
    auto schema = n_label_schema(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t num_members = 3 + rng.next_below(5);  // 3..7
        std::string dominant = schema.labels[rng.next_below(4)];
        std::size_t dominant_votes = num_members / 2 + 1;

        std::vector<std::string> column;
        for (std::size_t m = 0; m < num_members; ++m) {
            column.push_back(m < dominant_votes ? dominant
                                                : schema.labels[rng.next_below(4)]);
        }
        for (TieRule rule : {TieRule::schema_order, TieRule::train_majority}) {
            VoteSet votes;
            votes.schema = schema;
            votes.tie_rule = rule;
            votes.train_majority = schema.labels[rng.next_below(4)];
            for (const auto& v : column) votes.members.push_back({v});
            CHECK(majority_vote(votes) == std::vector<std::string>{dominant});
        }
    }
}

TEST_CASE("reordering members never changes the output") {
    SplitMix64 rng(888);
    auto schema = n_label_schema(3);
    for (int trial = 0; trial < 50; ++trial) {
        VoteSet votes;
        votes.schema = schema;
        std::size_t num_members = 2 + rng.next_below(5);
        std::size_t positions = 1 + rng.next_below(12);
        for (std::size_t m = 0; m < num_members; ++m) {
            std::vector<std::string> member;
            for (std::size_t p = 0; p < positions; ++p) {
                member.push_back(schema.labels[rng.next_below(3)]);
            }
            votes.members.push_back(std::move(member));
        }
        auto fused = majority_vote(votes);

        VoteSet shuffled = votes;
        seeded_shuffle(shuffled.members, trial + 1);
        CHECK(majority_vote(shuffled) == fused);
    }
}

TEST_CASE("vote set validation") {
    VoteSet empty;
    empty.schema = cvtest::abc_schema();
    CHECK_THROWS_AS(majority_vote(empty), ValidationError);

    VoteSet ragged;
    ragged.schema = cvtest::abc_schema();
    ragged.members = {{"A", "B"}, {"A"}};
    CHECK_THROWS_AS(majority_vote(ragged), ValidationError);

    VoteSet unknown;
    unknown.schema = cvtest::abc_schema();
    unknown.members = {{"Z"}};
    CHECK_THROWS_AS(majority_vote(unknown), ValidationError);

    VoteSet no_majority;
    no_majority.schema = cvtest::abc_schema();
    no_majority.members = {{"A"}};
    no_majority.tie_rule = TieRule::train_majority;
    CHECK_THROWS_AS(majority_vote(no_majority), ValidationError);
}

TEST_CASE("tie rule names round-trip") {
    CHECK(tie_rule_from_name("schema_order") == TieRule::schema_order);
    CHECK(tie_rule_from_name("train_majority") == TieRule::train_majority);
    CHECK(tie_rule_name(TieRule::schema_order) == "schema_order");
    CHECK_THROWS_AS(tie_rule_from_name("coin_flip"), ValidationError);
}

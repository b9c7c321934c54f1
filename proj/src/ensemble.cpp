#include "curvecv/ensemble.hpp"

#include "curvecv/error.hpp"

namespace curvecv {

const std::string& tie_rule_name(TieRule rule) {
    static const std::string schema_order = "schema_order";
    static const std::string train_majority = "train_majority";
    return rule == TieRule::schema_order ? schema_order : train_majority;
}

TieRule tie_rule_from_name(const std::string& name) {
    if (name == "schema_order") return TieRule::schema_order;
    if (name == "train_majority") return TieRule::train_majority;
    throw ValidationError("unknown tie rule: '" + name +
                          "' (schema_order, train_majority)");
}

std::vector<std::string> majority_vote(const VoteSet& votes) {
    if (votes.members.empty()) throw ValidationError("majority_vote: no members");
    const std::size_t positions = votes.members.front().size();
    for (std::size_t m = 1; m < votes.members.size(); ++m) {
        if (votes.members[m].size() != positions) {
            throw ValidationError("majority_vote: member " + std::to_string(m) + " has " +
                                  std::to_string(votes.members[m].size()) +
                                  " predictions, member 0 has " + std::to_string(positions));
        }
    }
    int majority_idx = -1;
    if (votes.tie_rule == TieRule::train_majority) {
        if (!votes.train_majority) {
            throw ValidationError(
                "majority_vote: tie_rule train_majority needs a recorded majority label");
        }
        majority_idx = votes.schema.label_index(*votes.train_majority);
        if (majority_idx < 0) {
            throw ValidationError("majority_vote: train_majority '" +
                                  *votes.train_majority + "' not in schema");
        }
    }

    const std::size_t num_labels = votes.schema.labels.size();
    std::vector<std::string> fused(positions);
    std::vector<std::uint32_t> tally(num_labels);

    for (std::size_t pos = 0; pos < positions; ++pos) {
        tally.assign(num_labels, 0);
        for (const auto& member : votes.members) {
            int idx = votes.schema.label_index(member[pos]);
            if (idx < 0) {
                throw ValidationError("majority_vote: label '" + member[pos] +
                                      "' not in schema '" + votes.schema.task_id + "'");
            }
            tally[static_cast<std::size_t>(idx)] += 1;
        }

        std::uint32_t best = 0;
        for (auto count : tally) best = std::max(best, count);
        // First label at the max count is the schema_order winner; a later
        // label can take it only under the train_majority rule.
        int winner = -1;
        bool tied = false;
        for (std::size_t l = 0; l < num_labels; ++l) {
            if (tally[l] != best) continue;
            if (winner < 0) {
                winner = static_cast<int>(l);
            } else {
                tied = true;
            }
        }
        if (tied && votes.tie_rule == TieRule::train_majority &&
            tally[static_cast<std::size_t>(majority_idx)] == best) {
            winner = majority_idx;
        }
        fused[pos] = votes.schema.labels[static_cast<std::size_t>(winner)];
    }
    return fused;
}

} // namespace curvecv

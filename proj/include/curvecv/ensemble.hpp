#ifndef CURVECV_ENSEMBLE_HPP
#define CURVECV_ENSEMBLE_HPP

#include <optional>
#include <string>
#include <vector>

#include "curvecv/schema.hpp"

namespace curvecv {

enum class TieRule { schema_order, train_majority };

const std::string& tie_rule_name(TieRule rule);
TieRule tie_rule_from_name(const std::string& name);

// Hard-label votes from k fold models over one shared evaluation set.
struct VoteSet {
    std::vector<std::vector<std::string>> members;  // equal-length label lists
    TaskSchema schema;
    TieRule tie_rule = TieRule::schema_order;
    // Required when tie_rule == train_majority: the recorded
    // training-majority label.
    std::optional<std::string> train_majority;
};

// Per position: the label with the strictly highest vote count. Ties go
// to the earliest tied label in schema order, or, under train_majority,
// to the recorded majority label when it is among the tied (falling back
// to schema order when it is not).
//
// Throws ValidationError on zero members, ragged member lengths, labels
// outside the schema, or a train_majority rule without a recorded label.
std::vector<std::string> majority_vote(const VoteSet& votes);

} // namespace curvecv

#endif

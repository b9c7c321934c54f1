#ifndef CURVECV_METRICS_HPP
#define CURVECV_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "curvecv/schema.hpp"

namespace curvecv {

struct ConfusionMatrix {
    TaskSchema schema;
    // Dense row-major counts, rows = gold label index, cols = predicted.
    std::vector<std::uint64_t> counts;

    std::uint64_t at(int gold, int pred) const;
    std::uint64_t total() const;
    int num_labels() const { return static_cast<int>(schema.labels.size()); }
};

struct Score {
    Metric metric = Metric::micro_f1;
    double value = 0.0;       // in [0, 1]
    std::uint64_t support = 0;
};

// Throws ValidationError on length mismatch or a label outside the schema.
ConfusionMatrix confusion(const std::vector<std::string>& gold,
                          const std::vector<std::string>& pred,
                          const TaskSchema& schema);

// F1 of the designated positive class. Every zero denominator
// (TP+FP = 0, TP+FN = 0, or P+R = 0) yields exactly 0.0; that convention
// is what makes an always-majority predictor score 0. support = gold
// positives.
Score binary_f1(const ConfusionMatrix& cm, const std::string& positive);

// Micro-averaged F1 over pooled per-class TP/FP/FN. For single-label
// prediction pooled FP == pooled FN, so the value reduces to
// diagonal/total (= accuracy) and is computed that way, exactly.
// Throws ValidationError on an empty matrix.
Score micro_f1(const ConfusionMatrix& cm);

// True iff every prediction equals the training-set majority label
// (vacuously true for an empty list).
bool is_majority_degenerate(const std::vector<std::string>& pred,
                            const std::string& train_majority);

// Report rounding: 4 decimal places, half-even. Scores are stored at
// full precision; only rendered reports pass through these.
double round_score(double value);
std::string format_score(double value);  // e.g. "0.6667"

} // namespace curvecv

#endif

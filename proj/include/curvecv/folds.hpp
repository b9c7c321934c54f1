#ifndef CURVECV_FOLDS_HPP
#define CURVECV_FOLDS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "curvecv/corpus.hpp"

namespace curvecv {

// A seeded k-fold partition plus, per fold, the order in which the other
// k-1 folds' examples are consumed as training data. Construction recipe,
// pinned for cross-language reproducibility:
//
//   1. sort ids lexicographically (byte order);
//   2. Fisher-Yates shuffle with splitmix64 seeded directly by `seed`;
//   3. shuffled[i] goes to fold i % k (round-robin slicing);
//   4. training order for fold f = the shuffled sequence minus fold f.
//
// Step 4 makes subsamples nested by construction: the size-s training
// subset for a fold is always a prefix of the size-s' subset for s' > s.
//
// The serialized plan file is the sole source of truth for a run;
// loading it never re-randomizes anything.
struct FoldPlan {
    std::uint64_t seed = 0;
    int k = 0;
    std::string generator;                              // "splitmix64"
    std::unordered_map<std::string, int> assignment;    // id -> fold
    std::vector<std::vector<std::string>> order;        // per fold: training ids

    std::size_t fold_size(int fold) const;

    // Canonical JSON document (sorted keys); byte-identical for
    // identical (corpus, k, seed).
    std::string to_json_string() const;
    static FoldPlan from_json_string(const std::string& text);

    void save(const std::filesystem::path& path) const;
    static FoldPlan load(const std::filesystem::path& path);

    std::string fingerprint() const;
};

// Throws ValidationError when k < 2, corpus.size() < k, or ids are not
// unique (the assignment is id-keyed).
FoldPlan make_folds(const Corpus& corpus, int k, std::uint64_t seed);

// Throws ValidationError when the plan does not cover exactly the
// corpus's id set.
void validate_plan(const FoldPlan& plan, const Corpus& corpus);

// First min(size, available) training ids of the fold, resolved to
// examples. Oversized requests are capped silently; callers that care
// record the actual size. size == 0 throws.
std::vector<LabeledExample> train_subset(const FoldPlan& plan, const Corpus& corpus,
                                         int held_out_fold, std::size_t size);

// All examples assigned to the fold, in corpus order.
std::vector<LabeledExample> held_out(const FoldPlan& plan, const Corpus& corpus,
                                     int fold);

struct SubsampleSchedule {
    std::vector<std::size_t> sizes;

    void validate() const;  // strictly increasing, all >= 1

    // 10, 50, 100, 175, 250, 500, 750, 1000, 1500, 2000, 3000, 4000,
    // 5000, 6000, 7000, 8000.
    static SubsampleSchedule default_schedule();
    static SubsampleSchedule parse(const std::string& comma_separated);
};

} // namespace curvecv

#endif

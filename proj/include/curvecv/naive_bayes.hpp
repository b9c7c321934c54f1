#ifndef CURVECV_NAIVE_BAYES_HPP
#define CURVECV_NAIVE_BAYES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "curvecv/backend.hpp"

namespace curvecv {

// Tokenization used by the reference backend, pinned exactly:
//   - input is UTF-8; invalid sequences decode to U+FFFD;
//   - a code point separates tokens when it is ASCII non-alphanumeric,
//     a Unicode space (U+0085, U+00A0, U+1680, U+2000..U+200A, U+2028,
//     U+2029, U+202F, U+205F, U+3000), anything in the General
//     Punctuation block (U+2000..U+206F), or one of U+00A1, U+00AB,
//     U+00BB, U+00BF;
//   - all other code points are token constituents;
//   - ASCII A-Z lowercases; no other case folding.
std::vector<std::string> nb_tokenize(std::string_view text);

// Multinomial naive Bayes over nb_tokenize tokens, add-one smoothing,
// class priors from training counts, argmax of log prior plus summed
// log token likelihoods, ties broken by schema label order. Tokens never
// seen in training are skipped at prediction time, so a fully-unseen
// text falls back to the training-majority class.
//
// Warm start from another task's checkpoint imports the origin's token
// vocabulary as a symmetric pseudo-count table: every token observed in
// the origin (counts pooled across its classes) contributes count 1 to
// every class of the *new* schema. Origin class structure is discarded;
// priors come only from the new training data, so the producible labels
// are exactly the new schema's. epochs/batch_size/warmup_steps/
// weight_decay are recorded but inert for this backend.
class NaiveBayesModel : public Model {
public:
    NaiveBayesModel(TaskSchema schema, TrainConfig config);

    const TaskSchema& schema() const override { return schema_; }
    const TrainConfig& config() const override { return config_; }

    // Data-parallel over texts (OpenMP when available).
    std::vector<std::string> predict(const std::vector<std::string>& texts) const override;
    // Single-threaded reference path; must agree with predict() exactly.
    std::vector<std::string> predict_serial(const std::vector<std::string>& texts) const;

    CheckpointRef save(const std::filesystem::path& dir) const override;
    std::string training_fingerprint() const override { return training_fingerprint_; }

    // Pooled per-token counts, for vocabulary import by a warm-started
    // successor.
    std::map<std::string, std::uint64_t> pooled_counts() const;

private:
    friend class NaiveBayesBackend;

    std::string predict_one(const std::string& text) const;

    TaskSchema schema_;
    TrainConfig config_;
    std::string training_fingerprint_;

    // token -> per-class counts (pseudo-counts from a warm start are
    // already merged in). Ordered map so serialization is canonical.
    std::map<std::string, std::vector<std::uint64_t>> token_counts_;
    std::vector<std::uint64_t> class_token_totals_;  // per class, incl. pseudo
    std::vector<std::uint64_t> prior_counts_;        // training examples per class
    std::uint64_t total_examples_ = 0;
};

class NaiveBayesBackend : public Backend {
public:
    const std::string& id() const override;

    std::unique_ptr<Model> train(const std::vector<LabeledExample>& examples,
                                 const TaskSchema& schema,
                                 const TrainConfig& config) const override;

    std::unique_ptr<Model> load(const CheckpointRef& ref) const override;
};

} // namespace curvecv

#endif

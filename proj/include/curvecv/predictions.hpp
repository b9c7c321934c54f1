#ifndef CURVECV_PREDICTIONS_HPP
#define CURVECV_PREDICTIONS_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace curvecv {

// The submission format shared by the runner, the scorer, and the
// ensemble fuser: headerless TSV, one "tweet_id<TAB>label" per line.
// Bit-exact contract; do not add columns or headers.
struct Prediction {
    std::string id;
    std::string label;

    bool operator==(const Prediction&) const = default;
};

void write_predictions(const std::filesystem::path& path,
                       const std::vector<Prediction>& preds);

// Throws ParseError on a line without exactly two columns.
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

// Gold files for the scorer: either the 2-column prediction format or
// the 3-column corpus format (id, text, label); the column count must be
// consistent across the file.
std::vector<Prediction> read_gold(const std::filesystem::path& path);

} // namespace curvecv

#endif

#ifndef CURVECV_CORPUS_HPP
#define CURVECV_CORPUS_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "curvecv/schema.hpp"

namespace curvecv {

struct LabeledExample {
    std::string id;
    std::string text;
    std::string label;

    bool operator==(const LabeledExample&) const = default;
};

struct Corpus {
    TaskSchema schema;
    std::vector<LabeledExample> examples;
    std::vector<std::string> provenance;

    std::size_t size() const { return examples.size(); }

    // Content fingerprint over (id, text, label) triples in order.
    std::string fingerprint() const;
};

struct MergeResult {
    Corpus corpus;
    std::size_t removed = 0;
    std::vector<std::string> warnings;
};

// Reads 3-column TSV: id \t text \t label, UTF-8, one record per line.
// A header row is recognized only when it is exactly "id\ttext\tlabel".
// Literal tabs inside text are impossible by construction (they change
// the column count and fail the line). Labels are canonicalized through
// the schema's alias map.
//
// Throws ParseError (wrong column count, naming the 1-based line) or
// ValidationError (unknown label, empty id, naming label and line).
Corpus parse_tsv(std::istream& in, const TaskSchema& schema,
                 const std::string& source_name);
Corpus parse_tsv_file(const std::filesystem::path& path,
                      const TaskSchema& schema);

// Concatenates parts in order, then keeps the first occurrence among
// examples with byte-identical text. No normalization of any kind: the
// dedup key is the exact text string. Duplicate texts carrying
// conflicting labels keep the first and add a warning instead of
// halting. Throws ValidationError on schema mismatch between parts.
MergeResult merge_and_dedup(const std::vector<Corpus>& parts);

// Every schema label appears as a key, possibly 0; counts sum to size().
std::map<std::string, std::size_t> class_counts(const Corpus& corpus);

// Persistence: JSON-lines, one {"id","text","label"} object per example,
// plus a sidecar manifest (schema, source files, removed-duplicate
// count) at manifest_path_for(path).
void save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                 std::size_t removed_duplicates);
Corpus load_corpus(const std::filesystem::path& path);
std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path);

} // namespace curvecv

#endif

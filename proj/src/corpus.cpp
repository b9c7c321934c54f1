#include "curvecv/corpus.hpp"

#include <fstream>
#include <istream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "curvecv/error.hpp"
#include "curvecv/rng.hpp"
#include "detail.hpp"

namespace curvecv {

using nlohmann::json;

std::string Corpus::fingerprint() const {
    std::uint64_t h = fnv1a64(schema.task_id);
    for (const auto& ex : examples) {
        h = fnv1a64(ex.id, h);
        h = fnv1a64("\x1f", 1, h);
        h = fnv1a64(ex.text, h);
        h = fnv1a64("\x1f", 1, h);
        h = fnv1a64(ex.label, h);
        h = fnv1a64("\x1e", 1, h);
    }
    return hex64(h);
}

Corpus parse_tsv(std::istream& in, const TaskSchema& schema,
                 const std::string& source_name) {
    schema.validate();
    Corpus corpus;
    corpus.schema = schema;
    corpus.provenance.push_back(source_name);

    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "id\ttext\tlabel") continue;  // optional header
        }
        auto fields = detail::split(line, '\t');
        if (fields.size() != 3) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": expected 3 tab-separated columns, got " +
                             std::to_string(fields.size()));
        }
        LabeledExample ex;
        ex.id = std::move(fields[0]);
        ex.text = std::move(fields[1]);
        if (ex.id.empty()) {
            throw ValidationError(source_name + ":" + std::to_string(line_no) +
                                  ": empty id");
        }
        auto label = schema.resolve_label(fields[2]);
        if (!label) {
            throw ValidationError(source_name + ":" + std::to_string(line_no) +
                                  ": unknown label '" + fields[2] + "' for schema '" +
                                  schema.task_id + "'");
        }
        ex.label = *label;
        corpus.examples.push_back(std::move(ex));
    }
    return corpus;
}

Corpus parse_tsv_file(const std::filesystem::path& path, const TaskSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    return parse_tsv(in, schema, path.string());
}

MergeResult merge_and_dedup(const std::vector<Corpus>& parts) {
    if (parts.empty()) throw ValidationError("merge: no corpora given");
    for (const auto& part : parts) {
        if (!(part.schema == parts.front().schema)) {
            throw ValidationError("merge: schema mismatch ('" + part.schema.task_id +
                                  "' vs '" + parts.front().schema.task_id + "')");
        }
    }

    MergeResult result;
    result.corpus.schema = parts.front().schema;

    std::size_t total = 0;
    for (const auto& part : parts) total += part.size();
    result.corpus.examples.reserve(total);

    std::unordered_map<std::string_view, const LabeledExample*> seen_text;
    std::unordered_set<std::string> seen_ids;
    for (const auto& part : parts) {
        for (const auto& src : part.provenance) {
            result.corpus.provenance.push_back(src);
        }
        for (const auto& ex : part.examples) {
            auto it = seen_text.find(ex.text);
            if (it != seen_text.end()) {
                ++result.removed;
                if (it->second->label != ex.label) {
                    result.warnings.push_back(
                        "duplicate text with conflicting labels: kept id '" +
                        it->second->id + "' (" + it->second->label + "), dropped id '" +
                        ex.id + "' (" + ex.label + ")");
                }
                continue;
            }
            if (!seen_ids.insert(ex.id).second) {
                result.warnings.push_back("duplicate id '" + ex.id +
                                          "' survives with different text");
            }
            result.corpus.examples.push_back(ex);
            seen_text.emplace(result.corpus.examples.back().text,
                              &result.corpus.examples.back());
        }
    }
    return result;
}

std::map<std::string, std::size_t> class_counts(const Corpus& corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& label : corpus.schema.labels) counts[label] = 0;
    for (const auto& ex : corpus.examples) counts[ex.label] += 1;
    return counts;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path) {
    std::filesystem::path p = corpus_path;
    p.replace_extension(".manifest.json");
    return p;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                 std::size_t removed_duplicates) {
    std::string body;
    for (const auto& ex : corpus.examples) {
        json j;
        j["id"] = ex.id;
        j["text"] = ex.text;
        j["label"] = ex.label;
        body += j.dump();
        body += '\n';
    }
    detail::write_file(path, body);

    json manifest;
    manifest["schema_id"] = corpus.schema.task_id;
    manifest["schema"] = json::parse(corpus.schema.to_json_string());
    manifest["sources"] = corpus.provenance;
    manifest["examples"] = corpus.examples.size();
    manifest["removed_duplicates"] = removed_duplicates;
    detail::write_file(manifest_path_for(path), manifest.dump(2) + "\n");
}

Corpus load_corpus(const std::filesystem::path& path) {
    json manifest;
    try {
        manifest = json::parse(detail::read_file(manifest_path_for(path)));
    } catch (const json::exception& e) {
        throw ParseError("corpus manifest " + manifest_path_for(path).string() + ": " +
                         e.what());
    }
    Corpus corpus;
    corpus.schema = TaskSchema::from_json_string(manifest.at("schema").dump());
    corpus.provenance = manifest.at("sources").get<std::vector<std::string>>();

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
        LabeledExample ex;
        ex.id = j.at("id").get<std::string>();
        ex.text = j.at("text").get<std::string>();
        ex.label = j.at("label").get<std::string>();
        if (!corpus.schema.has_label(ex.label)) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": label '" + ex.label + "' not in schema '" +
                                  corpus.schema.task_id + "'");
        }
        corpus.examples.push_back(std::move(ex));
    }
    return corpus;
}

} // namespace curvecv

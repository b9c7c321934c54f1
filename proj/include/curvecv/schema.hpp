#ifndef CURVECV_SCHEMA_HPP
#define CURVECV_SCHEMA_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace curvecv {

enum class Metric { binary_f1, micro_f1 };

const std::string& metric_name(Metric m);
Metric metric_from_name(const std::string& name);

// A classification task: its ordered label set, the designated positive
// label when the task is scored as binary F1, and the primary metric.
// Label order is load-bearing: it is the deterministic tie-break order
// used by the reference backend and the vote fuser.
struct TaskSchema {
    std::string task_id;
    std::vector<std::string> labels;
    std::optional<std::string> positive_label;
    Metric primary_metric = Metric::micro_f1;

    // On-disk label spellings vary between data drops ("Self Report",
    // "Self_reports", ...). Aliases map them onto the canonical labels
    // above; the mapping travels with the schema and is user-editable
    // when the schema is loaded from a file.
    std::map<std::string, std::string> label_aliases;

    // Throws ValidationError if any invariant is broken: duplicate or
    // too few labels, positive label missing from the set, binary_f1
    // without a positive label, alias targeting an unknown label.
    void validate() const;

    bool has_label(const std::string& label) const;
    // Index into labels, or -1.
    int label_index(const std::string& label) const;

    // Canonical label for an on-disk string: the label itself if
    // canonical, else the alias target, else nullopt.
    std::optional<std::string> resolve_label(const std::string& raw) const;

    std::string to_json_string() const;
    static TaskSchema from_json_string(const std::string& text);

    bool operator==(const TaskSchema& other) const;
};

// Preloaded schemas: "smm4h-task5" (binary, positive class "potential")
// and "smm4h-task6" (three-way, micro-F1).
const TaskSchema& builtin_schema(const std::string& schema_id);
bool is_builtin_schema(const std::string& schema_id);
std::vector<std::string> builtin_schema_ids();

// Resolve a --schema argument: a builtin id, or a path to a schema JSON
// file ({task_id, labels, positive_label, primary_metric, label_aliases}).
TaskSchema load_schema(const std::string& id_or_path);

} // namespace curvecv

#endif

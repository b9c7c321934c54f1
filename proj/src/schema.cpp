#include "curvecv/schema.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <unordered_set>

#include <json.hpp>

#include "curvecv/error.hpp"
#include "curvecv/rng.hpp"
#include "detail.hpp"

namespace curvecv {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const std::string& metric_name(Metric m) {
    static const std::string binary = "binary_f1";
    static const std::string micro = "micro_f1";
    return m == Metric::binary_f1 ? binary : micro;
}

Metric metric_from_name(const std::string& name) {
    if (name == "binary_f1") return Metric::binary_f1;
    if (name == "micro_f1") return Metric::micro_f1;
    throw ValidationError("unknown metric: '" + name + "'");
}

void TaskSchema::validate() const {
    if (task_id.empty()) throw ValidationError("schema: task_id is empty");
    if (labels.size() < 2) {
        throw ValidationError("schema '" + task_id + "': needs at least 2 labels, has " +
                              std::to_string(labels.size()));
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : labels) {
        if (label.empty()) throw ValidationError("schema '" + task_id + "': empty label");
        if (!seen.insert(label).second) {
            throw ValidationError("schema '" + task_id + "': duplicate label '" + label + "'");
        }
    }
    if (positive_label && !seen.count(*positive_label)) {
        throw ValidationError("schema '" + task_id + "': positive_label '" + *positive_label +
                              "' is not a label");
    }
    if (primary_metric == Metric::binary_f1 && !positive_label) {
        throw ValidationError("schema '" + task_id +
                              "': binary_f1 requires a positive_label");
    }
    for (const auto& [alias, target] : label_aliases) {
        if (!seen.count(target)) {
            throw ValidationError("schema '" + task_id + "': alias '" + alias +
                                  "' maps to unknown label '" + target + "'");
        }
    }
}

bool TaskSchema::has_label(const std::string& label) const {
    return label_index(label) >= 0;
}

int TaskSchema::label_index(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return -1;
    return static_cast<int>(it - labels.begin());
}

std::optional<std::string> TaskSchema::resolve_label(const std::string& raw) const {
    if (has_label(raw)) return raw;
    auto it = label_aliases.find(raw);
    if (it != label_aliases.end()) return it->second;
    return std::nullopt;
}

bool TaskSchema::operator==(const TaskSchema& other) const {
    return task_id == other.task_id && labels == other.labels &&
           positive_label == other.positive_label &&
           primary_metric == other.primary_metric;
}

namespace {

json schema_to_json(const TaskSchema& s) {
    json j;
    j["task_id"] = s.task_id;
    j["labels"] = s.labels;
    j["positive_label"] = s.positive_label ? json(*s.positive_label) : json(nullptr);
    j["primary_metric"] = metric_name(s.primary_metric);
    j["label_aliases"] = s.label_aliases;
    return j;
}

TaskSchema schema_from_json(const json& j) {
    TaskSchema s;
    s.task_id = j.at("task_id").get<std::string>();
    s.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("positive_label") && !j.at("positive_label").is_null()) {
        s.positive_label = j.at("positive_label").get<std::string>();
    }
    s.primary_metric = metric_from_name(j.at("primary_metric").get<std::string>());
    if (j.contains("label_aliases")) {
        s.label_aliases = j.at("label_aliases").get<std::map<std::string, std::string>>();
    }
    s.validate();
    return s;
}

} // namespace

std::string TaskSchema::to_json_string() const {
    return schema_to_json(*this).dump();
}

TaskSchema TaskSchema::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema JSON: ") + e.what());
    }
    return schema_from_json(j);
}

namespace {

TaskSchema make_task5() {
    TaskSchema s;
    s.task_id = "smm4h-task5";
    s.labels = {"potential", "Other"};
    s.positive_label = "potential";
    s.primary_metric = Metric::binary_f1;
    s.label_aliases = {
        {"Potential", "potential"},
        {"potential case", "potential"},
        {"other", "Other"},
    };
    return s;
}

TaskSchema make_task6() {
    TaskSchema s;
    s.task_id = "smm4h-task6";
    s.labels = {"self", "nonpersonal", "lit-news"};
    s.primary_metric = Metric::micro_f1;
    s.label_aliases = {
        {"Self Report", "self"},
        {"Self_reports", "self"},
        {"self_report", "self"},
        {"Nonpersonal", "nonpersonal"},
        {"non-personal", "nonpersonal"},
        {"Non-personal", "nonpersonal"},
        {"Lit-News", "lit-news"},
        {"Lit-News_mentions", "lit-news"},
        {"lit_news", "lit-news"},
    };
    return s;
}

} // namespace

const TaskSchema& builtin_schema(const std::string& schema_id) {
    static const TaskSchema task5 = make_task5();
    static const TaskSchema task6 = make_task6();
    if (schema_id == task5.task_id) return task5;
    if (schema_id == task6.task_id) return task6;
    throw ValidationError("unknown schema id: '" + schema_id +
                          "' (builtin: smm4h-task5, smm4h-task6)");
}

bool is_builtin_schema(const std::string& schema_id) {
    return schema_id == "smm4h-task5" || schema_id == "smm4h-task6";
}

std::vector<std::string> builtin_schema_ids() {
    return {"smm4h-task5", "smm4h-task6"};
}

TaskSchema load_schema(const std::string& id_or_path) {
    if (is_builtin_schema(id_or_path)) return builtin_schema(id_or_path);
    if (std::filesystem::exists(id_or_path)) {
        return TaskSchema::from_json_string(detail::read_file(id_or_path));
    }
    throw ValidationError("unknown schema id: '" + id_or_path +
                          "' (builtin: smm4h-task5, smm4h-task6; or a schema JSON file)");
}

} // namespace curvecv

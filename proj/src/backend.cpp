#include "curvecv/backend.hpp"

#include <map>
#include <mutex>

#include <json.hpp>

#include "curvecv/error.hpp"
#include "curvecv/naive_bayes.hpp"
#include "curvecv/rng.hpp"
#include "detail.hpp"

namespace curvecv {

using nlohmann::json;

std::filesystem::path checkpoint_manifest_path(const std::filesystem::path& dir) {
    return dir / "manifest.json";
}

std::string CheckpointRef::to_json_string() const {
    json j;
    j["path"] = path;
    j["schema"] = json::parse(schema_of_origin.to_json_string());
    j["backend_id"] = backend_id;
    j["config_fingerprint"] = config_fingerprint;
    return j.dump();
}

CheckpointRef CheckpointRef::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("checkpoint ref JSON: ") + e.what());
    }
    CheckpointRef ref;
    ref.path = j.at("path").get<std::string>();
    ref.schema_of_origin = TaskSchema::from_json_string(j.at("schema").dump());
    ref.backend_id = j.at("backend_id").get<std::string>();
    ref.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    return ref;
}

CheckpointRef CheckpointRef::from_dir(const std::filesystem::path& dir) {
    auto manifest_path = checkpoint_manifest_path(dir);
    if (!std::filesystem::exists(manifest_path)) {
        throw Error("no checkpoint manifest at " + manifest_path.string());
    }
    json manifest;
    try {
        manifest = json::parse(detail::read_file(manifest_path));
    } catch (const json::exception& e) {
        throw ParseError("checkpoint manifest " + manifest_path.string() + ": " + e.what());
    }
    CheckpointRef ref;
    ref.path = dir.string();
    ref.schema_of_origin = TaskSchema::from_json_string(manifest.at("schema").dump());
    ref.backend_id = manifest.at("backend_id").get<std::string>();
    ref.config_fingerprint = manifest.at("config_fingerprint").get<std::string>();
    return ref;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ValidationError("config: epochs must be >= 1");
    if (batch_size < 1) throw ValidationError("config: batch_size must be >= 1");
    if (warmup_steps < 0) throw ValidationError("config: warmup_steps must be >= 0");
    if (weight_decay < 0.0) throw ValidationError("config: weight_decay must be >= 0");
}

std::string TrainConfig::to_json_string() const {
    json j;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["warmup_steps"] = warmup_steps;
    j["weight_decay"] = weight_decay;
    j["seed"] = seed;
    j["backend_id"] = backend_id.empty() ? default_backend_id() : backend_id;
    // The checkpoint enters by identity, not by location.
    j["init_checkpoint"] =
        init_checkpoint ? json(init_checkpoint->config_fingerprint + "@" +
                               init_checkpoint->schema_of_origin.task_id)
                        : json(nullptr);
    return j.dump();
}

std::string TrainConfig::fingerprint() const {
    return hex64(fnv1a64(to_json_string()));
}

namespace {

struct Registry {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<Backend>> backends;
};

Registry& the_registry() {
    static Registry registry;
    static std::once_flag init;
    std::call_once(init, [] {
        auto nb = std::make_shared<NaiveBayesBackend>();
        registry.backends.emplace(nb->id(), std::move(nb));
    });
    return registry;
}

} // namespace

const std::string& default_backend_id() {
    static const std::string id = "nb-ref";
    return id;
}

const Backend& lookup_backend(const std::string& backend_id) {
    const std::string& id = backend_id.empty() ? default_backend_id() : backend_id;
    auto& registry = the_registry();
    std::lock_guard<std::mutex> lock(registry.mutex);
    auto it = registry.backends.find(id);
    if (it == registry.backends.end()) {
        std::string known;
        for (const auto& [known_id, _] : registry.backends) {
            if (!known.empty()) known += ", ";
            known += known_id;
        }
        throw ValidationError("unknown backend_id '" + id + "' (registered: " + known + ")");
    }
    return *it->second;
}

void register_backend(std::shared_ptr<Backend> backend) {
    auto& registry = the_registry();
    std::lock_guard<std::mutex> lock(registry.mutex);
    registry.backends[backend->id()] = std::move(backend);
}

std::vector<std::string> registered_backend_ids() {
    auto& registry = the_registry();
    std::lock_guard<std::mutex> lock(registry.mutex);
    std::vector<std::string> ids;
    for (const auto& [id, _] : registry.backends) ids.push_back(id);
    return ids;
}

} // namespace curvecv

#ifndef CURVECV_BACKEND_HPP
#define CURVECV_BACKEND_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curvecv/corpus.hpp"
#include "curvecv/schema.hpp"

namespace curvecv {

// A trained-and-saved model on disk. schema_of_origin is the schema the
// checkpoint was trained under, which need not match the schema of a run
// that warm-starts from it.
struct CheckpointRef {
    std::string path;
    TaskSchema schema_of_origin;
    std::string backend_id;
    std::string config_fingerprint;

    std::string to_json_string() const;
    static CheckpointRef from_json_string(const std::string& text);

    // Reads the manifest of a saved checkpoint directory.
    static CheckpointRef from_dir(const std::filesystem::path& dir);
};

struct TrainConfig {
    int epochs = 3;
    int batch_size = 64;
    int warmup_steps = 500;
    double weight_decay = 0.01;
    std::uint64_t seed = 0;
    std::optional<CheckpointRef> init_checkpoint;
    std::string backend_id;  // empty = default backend

    void validate() const;

    // Stable hash over the canonical JSON form (init_checkpoint enters
    // by its own fingerprint, not its path).
    std::string fingerprint() const;
    std::string to_json_string() const;
};

// Immutable handle to a trained model.
class Model {
public:
    virtual ~Model() = default;

    virtual const TaskSchema& schema() const = 0;
    virtual const TrainConfig& config() const = 0;

    // Output length equals input length; every label belongs to
    // schema().labels. Safe under concurrent callers.
    virtual std::vector<std::string> predict(const std::vector<std::string>& texts) const = 0;

    // Writes manifest + payload into dir (created if needed).
    virtual CheckpointRef save(const std::filesystem::path& dir) const = 0;

    // Hash of the training set this handle was fitted on.
    virtual std::string training_fingerprint() const = 0;
};

class Backend {
public:
    virtual ~Backend() = default;

    virtual const std::string& id() const = 0;

    // Throws ValidationError on an empty training set, labels outside
    // the schema, or an init checkpoint whose backend_id differs.
    virtual std::unique_ptr<Model> train(const std::vector<LabeledExample>& examples,
                                         const TaskSchema& schema,
                                         const TrainConfig& config) const = 0;

    // Throws Error when the artifact is missing or the checkpoint's
    // backend_id does not match this backend.
    virtual std::unique_ptr<Model> load(const CheckpointRef& ref) const = 0;
};

// Registry keyed by backend_id. The deterministic reference backend
// ("nb-ref") is always registered; adapters for external encoders (e.g.
// a distilbert-base-uncased fine-tuner) register themselves here and the
// rest of the harness never knows the difference.
const Backend& lookup_backend(const std::string& backend_id);
void register_backend(std::shared_ptr<Backend> backend);
std::vector<std::string> registered_backend_ids();
const std::string& default_backend_id();  // "nb-ref"

// Checkpoint manifest filename within a checkpoint directory.
std::filesystem::path checkpoint_manifest_path(const std::filesystem::path& dir);

} // namespace curvecv

#endif

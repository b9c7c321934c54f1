#include "curvecv/naive_bayes.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "curvecv/error.hpp"
#include "curvecv/rng.hpp"
#include "detail.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace curvecv {

using nlohmann::json;

namespace {

// Decodes one code point at s[i], advancing i. Anything malformed
// (stray continuation byte, overlong lead, surrogate, > U+10FFFF)
// yields U+FFFD and consumes a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b = [&](std::size_t off) { return static_cast<unsigned char>(s[i + off]); };
    const unsigned char b0 = b(0);
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    auto cont = [&](std::size_t off) {
        return i + off < s.size() && (b(off) & 0xC0) == 0x80;
    };
    if (b0 >= 0xC2 && b0 <= 0xDF && cont(1)) {
        char32_t cp = ((b0 & 0x1Fu) << 6) | (b(1) & 0x3Fu);
        i += 2;
        return cp;
    }
    if (b0 >= 0xE0 && b0 <= 0xEF && cont(1) && cont(2)) {
        char32_t cp = ((b0 & 0x0Fu) << 12) | ((b(1) & 0x3Fu) << 6) | (b(2) & 0x3Fu);
        i += 3;
        if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return 0xFFFD;
        return cp;
    }
    if (b0 >= 0xF0 && b0 <= 0xF4 && cont(1) && cont(2) && cont(3)) {
        char32_t cp = ((b0 & 0x07u) << 18) | ((b(1) & 0x3Fu) << 12) |
                      ((b(2) & 0x3Fu) << 6) | (b(3) & 0x3Fu);
        i += 4;
        if (cp < 0x10000 || cp > 0x10FFFF) return 0xFFFD;
        return cp;
    }
    i += 1;
    return 0xFFFD;
}

bool is_separator(char32_t cp) {
    if (cp < 0x80) {
        return !((cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') ||
                 (cp >= 'a' && cp <= 'z'));
    }
    switch (cp) {
        case 0x0085:  // NEL
        case 0x00A0:  // no-break space
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x3000:
        case 0x00A1:  // inverted exclamation
        case 0x00AB:  // guillemets
        case 0x00BB:
        case 0x00BF:  // inverted question mark
            return true;
        default:
            break;
    }
    // Unicode spaces U+2000..U+200A and the General Punctuation block
    // (curly quotes, dashes, ellipsis) in one range.
    return cp >= 0x2000 && cp <= 0x206F;
}

} // namespace

std::vector<std::string> nb_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        char32_t cp = decode_utf8(text, i);
        if (is_separator(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        if (cp == 0xFFFD) {
            current += "\xEF\xBF\xBD";  // keep tokens valid UTF-8
        } else if (cp >= 'A' && cp <= 'Z') {
            current += static_cast<char>(cp - 'A' + 'a');
        } else {
            current.append(text.substr(start, i - start));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

NaiveBayesModel::NaiveBayesModel(TaskSchema schema, TrainConfig config)
    : schema_(std::move(schema)), config_(std::move(config)) {
    const std::size_t k = schema_.labels.size();
    class_token_totals_.assign(k, 0);
    prior_counts_.assign(k, 0);
}

std::map<std::string, std::uint64_t> NaiveBayesModel::pooled_counts() const {
    std::map<std::string, std::uint64_t> pooled;
    for (const auto& [token, per_class] : token_counts_) {
        std::uint64_t sum = 0;
        for (auto c : per_class) sum += c;
        pooled[token] = sum;
    }
    return pooled;
}

std::string NaiveBayesModel::predict_one(const std::string& text) const {
    const std::size_t k = schema_.labels.size();
    const double vocab = static_cast<double>(token_counts_.size());
    const double log_total = std::log(static_cast<double>(total_examples_));

    std::vector<double> scores(k, -std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < k; ++c) {
        if (prior_counts_[c] == 0) continue;
        scores[c] = std::log(static_cast<double>(prior_counts_[c])) - log_total;
    }

    for (const auto& token : nb_tokenize(text)) {
        auto it = token_counts_.find(token);
        if (it == token_counts_.end()) continue;  // unseen in training: skip
        for (std::size_t c = 0; c < k; ++c) {
            if (prior_counts_[c] == 0) continue;
            scores[c] += std::log(static_cast<double>(it->second[c]) + 1.0) -
                         std::log(static_cast<double>(class_token_totals_[c]) + vocab);
        }
    }

    // Strict > keeps the earliest label on exact ties: schema-order
    // tie-breaking.
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return schema_.labels[best];
}

std::vector<std::string> NaiveBayesModel::predict_serial(
    const std::vector<std::string>& texts) const {
    std::vector<std::string> out(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) out[i] = predict_one(texts[i]);
    return out;
}

std::vector<std::string> NaiveBayesModel::predict(
    const std::vector<std::string>& texts) const {
    std::vector<std::string> out(texts.size());
#ifdef _OPENMP
    #pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(texts.size()); ++i) {
        out[static_cast<std::size_t>(i)] = predict_one(texts[static_cast<std::size_t>(i)]);
    }
#else
    for (std::size_t i = 0; i < texts.size(); ++i) out[i] = predict_one(texts[i]);
#endif
    return out;
}

const std::string& NaiveBayesBackend::id() const {
    return default_backend_id();  // "nb-ref"
}

namespace {

std::string hash_examples(const std::vector<LabeledExample>& examples) {
    std::uint64_t h = 1469598103934665603ULL;
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

} // namespace

std::unique_ptr<Model> NaiveBayesBackend::train(const std::vector<LabeledExample>& examples,
                                                const TaskSchema& schema,
                                                const TrainConfig& config) const {
    schema.validate();
    config.validate();
    if (examples.empty()) throw ValidationError("train: empty training set");
    if (!config.backend_id.empty() && config.backend_id != id()) {
        throw ValidationError("train: config backend_id '" + config.backend_id +
                              "' routed to backend '" + id() + "'");
    }

    auto model = std::make_unique<NaiveBayesModel>(schema, config);
    model->training_fingerprint_ = hash_examples(examples);

    const std::size_t k = schema.labels.size();
    for (const auto& ex : examples) {
        int cls = schema.label_index(ex.label);
        if (cls < 0) {
            throw ValidationError("train: example '" + ex.id + "' has label '" + ex.label +
                                  "' outside schema '" + schema.task_id + "'");
        }
        model->prior_counts_[static_cast<std::size_t>(cls)] += 1;
        model->total_examples_ += 1;
        for (const auto& token : nb_tokenize(ex.text)) {
            auto it = model->token_counts_.try_emplace(token, std::vector<std::uint64_t>(k, 0))
                          .first;
            it->second[static_cast<std::size_t>(cls)] += 1;
            model->class_token_totals_[static_cast<std::size_t>(cls)] += 1;
        }
    }

    if (config.init_checkpoint) {
        const CheckpointRef& ref = *config.init_checkpoint;
        if (ref.backend_id != id()) {
            throw ValidationError("train: init checkpoint backend '" + ref.backend_id +
                                  "' does not match backend '" + id() + "'");
        }
        // Keep-body / re-initialize-head analogue: the origin contributes
        // its token vocabulary as one symmetric pseudo-count per class;
        // priors stay purely task-local.
        auto origin = load(ref);
        auto& origin_nb = dynamic_cast<NaiveBayesModel&>(*origin);
        for (const auto& [token, pooled] : origin_nb.pooled_counts()) {
            if (pooled == 0) continue;
            auto it = model->token_counts_.try_emplace(token, std::vector<std::uint64_t>(k, 0))
                          .first;
            for (std::size_t c = 0; c < k; ++c) {
                it->second[c] += 1;
                model->class_token_totals_[c] += 1;
            }
        }
    }

    return model;
}

CheckpointRef NaiveBayesModel::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);

    json manifest;
    manifest["backend_id"] = default_backend_id();
    manifest["schema"] = json::parse(schema_.to_json_string());
    manifest["config_fingerprint"] = config_.fingerprint();
    manifest["created_at"] = detail::now_iso8601();
    detail::write_file(checkpoint_manifest_path(dir), manifest.dump(2) + "\n");

    json payload;
    payload["schema"] = json::parse(schema_.to_json_string());
    payload["config"] = json::parse(config_.to_json_string());
    payload["init_checkpoint"] =
        config_.init_checkpoint ? json::parse(config_.init_checkpoint->to_json_string())
                                : json(nullptr);
    payload["prior_counts"] = prior_counts_;
    payload["class_token_totals"] = class_token_totals_;
    payload["total_examples"] = total_examples_;
    payload["token_counts"] = token_counts_;
    payload["training_fingerprint"] = training_fingerprint_;
    detail::write_file(dir / "nb_payload.json", payload.dump() + "\n");

    CheckpointRef ref;
    ref.path = dir.string();
    ref.schema_of_origin = schema_;
    ref.backend_id = default_backend_id();
    ref.config_fingerprint = config_.fingerprint();
    return ref;
}

std::unique_ptr<Model> NaiveBayesBackend::load(const CheckpointRef& ref) const {
    if (ref.backend_id != id()) {
        throw Error("checkpoint backend mismatch: ref says '" + ref.backend_id +
                    "', loading backend is '" + id() + "'");
    }
    std::filesystem::path dir(ref.path);
    auto manifest_path = checkpoint_manifest_path(dir);
    if (!std::filesystem::exists(manifest_path)) {
        throw Error("missing checkpoint artifact: " + manifest_path.string());
    }
    json manifest = json::parse(detail::read_file(manifest_path));
    if (manifest.at("backend_id").get<std::string>() != id()) {
        throw Error("checkpoint backend mismatch: manifest says '" +
                    manifest.at("backend_id").get<std::string>() + "', loading backend is '" +
                    id() + "'");
    }
    if (manifest.at("config_fingerprint").get<std::string>() != ref.config_fingerprint) {
        throw Error("checkpoint fingerprint mismatch under " + ref.path);
    }

    json payload;
    try {
        payload = json::parse(detail::read_file(dir / "nb_payload.json"));
    } catch (const json::exception& e) {
        throw ParseError("checkpoint payload " + (dir / "nb_payload.json").string() + ": " +
                         e.what());
    }

    TaskSchema schema = TaskSchema::from_json_string(payload.at("schema").dump());
    TrainConfig config;
    {
        const json& cfg = payload.at("config");
        config.epochs = cfg.at("epochs").get<int>();
        config.batch_size = cfg.at("batch_size").get<int>();
        config.warmup_steps = cfg.at("warmup_steps").get<int>();
        config.weight_decay = cfg.at("weight_decay").get<double>();
        config.seed = cfg.at("seed").get<std::uint64_t>();
        config.backend_id = cfg.at("backend_id").get<std::string>();
        if (!payload.at("init_checkpoint").is_null()) {
            config.init_checkpoint =
                CheckpointRef::from_json_string(payload.at("init_checkpoint").dump());
        }
    }

    auto model = std::make_unique<NaiveBayesModel>(schema, config);
    model->prior_counts_ = payload.at("prior_counts").get<std::vector<std::uint64_t>>();
    model->class_token_totals_ =
        payload.at("class_token_totals").get<std::vector<std::uint64_t>>();
    model->total_examples_ = payload.at("total_examples").get<std::uint64_t>();
    model->token_counts_ =
        payload.at("token_counts").get<std::map<std::string, std::vector<std::uint64_t>>>();
    model->training_fingerprint_ = payload.at("training_fingerprint").get<std::string>();
    return model;
}

} // namespace curvecv

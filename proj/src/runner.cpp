#include "curvecv/runner.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "curvecv/error.hpp"
#include "curvecv/predictions.hpp"
#include "curvecv/rng.hpp"
#include "detail.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace curvecv {

using nlohmann::json;

const std::string& arm_name(Arm arm) {
    static const std::string plain = "plain";
    static const std::string warm = "warm";
    return arm == Arm::plain ? plain : warm;
}

Arm arm_from_name(const std::string& name) {
    if (name == "plain") return Arm::plain;
    if (name == "warm") return Arm::warm;
    throw ValidationError("unknown arm: '" + name + "' (plain, warm)");
}

std::string RunRecord::to_json_string() const {
    json j;
    j["task_id"] = task_id;
    j["fold"] = fold;
    j["train_size_requested"] = train_size_requested;
    j["train_size_actual"] = train_size_actual;
    j["arm"] = arm_name(arm);
    j["warm_start"] = warm_start_origin ? json(*warm_start_origin) : json(nullptr);
    j["warm_start_fingerprint"] =
        warm_start_fingerprint ? json(*warm_start_fingerprint) : json(nullptr);
    j["backend_id"] = backend_id;
    j["seed"] = seed;
    j["primary_metric"] = primary_metric;
    json scores_json = json::array();
    for (const auto& s : scores) {
        scores_json.push_back({{"metric", metric_name(s.metric)},
                               {"value", s.value},
                               {"support", s.support}});
    }
    j["scores"] = std::move(scores_json);
    j["degenerate_majority"] = degenerate_majority;
    j["predictions_path"] = predictions_path;
    j["config_fingerprint"] = config_fingerprint;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["failed"] = failed;
    j["error"] = error;
    return j.dump();
}

RunRecord RunRecord::from_json_string(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("run record JSON: ") + e.what());
    }
    RunRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.fold = j.at("fold").get<int>();
    r.train_size_requested = j.at("train_size_requested").get<std::size_t>();
    r.train_size_actual = j.at("train_size_actual").get<std::size_t>();
    r.arm = arm_from_name(j.at("arm").get<std::string>());
    if (!j.at("warm_start").is_null()) {
        r.warm_start_origin = j.at("warm_start").get<std::string>();
    }
    if (!j.at("warm_start_fingerprint").is_null()) {
        r.warm_start_fingerprint = j.at("warm_start_fingerprint").get<std::string>();
    }
    r.backend_id = j.at("backend_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.primary_metric = j.at("primary_metric").get<std::string>();
    for (const auto& s : j.at("scores")) {
        Score score;
        score.metric = metric_from_name(s.at("metric").get<std::string>());
        score.value = s.at("value").get<double>();
        score.support = s.at("support").get<std::uint64_t>();
        r.scores.push_back(score);
    }
    r.degenerate_majority = j.at("degenerate_majority").get<bool>();
    r.predictions_path = j.at("predictions_path").get<std::string>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    r.failed = j.at("failed").get<bool>();
    r.error = j.at("error").get<std::string>();
    return r;
}

double RunRecord::primary_value() const {
    Metric want = metric_from_name(primary_metric);
    for (const auto& s : scores) {
        if (s.metric == want) return s.value;
    }
    throw ValidationError("record " + task_id + "/" + std::to_string(fold) + "/" +
                          std::to_string(train_size_requested) +
                          ": primary metric missing from scores");
}

RunStore::RunStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path RunStore::records_path(const std::string& task_id, Arm arm) const {
    return root_ / (task_id + "_" + arm_name(arm) + ".jsonl");
}

std::filesystem::path RunStore::predictions_path(const std::string& task_id, int fold,
                                                 std::size_t size, Arm arm) const {
    return root_ / (task_id + "_" + std::to_string(fold) + "_" + std::to_string(size) +
                    "_" + arm_name(arm) + ".tsv");
}

std::filesystem::path RunStore::plan_path(const std::string& task_id) const {
    return root_ / (task_id + "_plan.json");
}

std::filesystem::path RunStore::checkpoint_dir(const std::string& name) const {
    return root_ / "checkpoints" / name;
}

void RunStore::append(const RunRecord& record) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    std::ofstream out(records_path(record.task_id, record.arm),
                      std::ios::binary | std::ios::app);
    if (!out) {
        throw Error("cannot append to " + records_path(record.task_id, record.arm).string());
    }
    out << record.to_json_string() << '\n';
}

namespace {

// Cell key within one (task, arm) file.
std::pair<int, std::size_t> cell_key(const RunRecord& r) {
    return {r.fold, r.train_size_requested};
}

} // namespace

std::vector<RunRecord> RunStore::load(const std::string& task_id, Arm arm) const {
    auto path = records_path(task_id, arm);
    if (!std::filesystem::exists(path)) return {};

    std::map<std::pair<int, std::size_t>, RunRecord> latest;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;
        RunRecord r;
        try {
            r = RunRecord::from_json_string(line);
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        latest.insert_or_assign(cell_key(r), std::move(r));
    }
    std::vector<RunRecord> records;
    records.reserve(latest.size());
    for (auto& [key, r] : latest) records.push_back(std::move(r));
    return records;
}

std::vector<RunRecord> RunStore::load(const std::string& task_id) const {
    auto records = load(task_id, Arm::plain);
    auto warm = load(task_id, Arm::warm);
    records.insert(records.end(), std::make_move_iterator(warm.begin()),
                   std::make_move_iterator(warm.end()));
    return records;
}

void RunStore::compact(const std::string& task_id, Arm arm) {
    auto records = load(task_id, arm);  // sorted by (fold, size), last wins
    if (records.empty()) return;
    std::string body;
    for (const auto& r : records) {
        body += r.to_json_string();
        body += '\n';
    }
    std::lock_guard<std::mutex> lock(write_mutex_);
    detail::write_file(records_path(task_id, arm), body);
}

bool RunStore::has_predictions(const RunRecord& record) const {
    return !record.predictions_path.empty() &&
           std::filesystem::exists(root_ / record.predictions_path);
}

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& task_id, int fold,
                        std::size_t size, Arm arm) {
    std::string material = std::to_string(base_seed) + "|" + task_id + "|" +
                           std::to_string(fold) + "|" + std::to_string(size) + "|" +
                           arm_name(arm);
    return fnv1a64(material);
}

std::string cell_fingerprint(const Corpus& corpus, const FoldPlan& plan, int fold,
                             std::size_t size, Arm arm, const TrainConfig& config,
                             const std::optional<CheckpointRef>& warm_start) {
    std::string material = corpus.fingerprint() + "|" + plan.fingerprint() + "|" +
                           std::to_string(fold) + "|" + std::to_string(size) + "|" +
                           arm_name(arm) + "|" + config.to_json_string() + "|" +
                           (warm_start ? warm_start->config_fingerprint : "none");
    return hex64(fnv1a64(material));
}

namespace {

std::string subset_majority_label(const std::vector<LabeledExample>& subset,
                                  const TaskSchema& schema) {
    std::vector<std::size_t> counts(schema.labels.size(), 0);
    for (const auto& ex : subset) {
        int idx = schema.label_index(ex.label);
        if (idx >= 0) counts[static_cast<std::size_t>(idx)] += 1;
    }
    std::size_t best = 0;
    for (std::size_t l = 1; l < counts.size(); ++l) {
        if (counts[l] > counts[best]) best = l;  // ties: earliest in schema order
    }
    return schema.labels[best];
}

} // namespace

RunRecord run_cell(const Corpus& corpus, const FoldPlan& plan, int fold, std::size_t size,
                   Arm arm, const TrainConfig& config,
                   const std::optional<CheckpointRef>& warm_start, RunStore& store) {
    const TaskSchema& schema = corpus.schema;
    if (fold < 0 || fold >= plan.k) {
        throw ValidationError("run_cell: fold index " + std::to_string(fold) +
                              " out of range [0, " + std::to_string(plan.k) + ")");
    }
    if (size == 0) throw ValidationError("run_cell: size must be >= 1");

    RunRecord record;
    record.task_id = schema.task_id;
    record.fold = fold;
    record.train_size_requested = size;
    record.arm = arm;
    record.backend_id = config.backend_id.empty() ? default_backend_id() : config.backend_id;
    record.primary_metric = metric_name(schema.primary_metric);
    record.started_at = detail::now_iso8601();

    TrainConfig cell_config = config;
    cell_config.seed = cell_seed(config.seed, schema.task_id, fold, size, arm);
    if (arm == Arm::warm) {
        if (!warm_start) {
            throw ValidationError("run_cell: warm arm without a warm-start checkpoint");
        }
        cell_config.init_checkpoint = *warm_start;
        record.warm_start_origin = warm_start->schema_of_origin.task_id;
        record.warm_start_fingerprint = warm_start->config_fingerprint;
    } else {
        cell_config.init_checkpoint.reset();
    }
    record.seed = cell_config.seed;
    record.config_fingerprint =
        cell_fingerprint(corpus, plan, fold, size, arm, cell_config,
                         arm == Arm::warm ? warm_start : std::nullopt);

    try {
        auto subset = train_subset(plan, corpus, fold, size);
        record.train_size_actual = subset.size();

        const Backend& backend = lookup_backend(cell_config.backend_id);
        auto model = backend.train(subset, schema, cell_config);

        auto held = held_out(plan, corpus, fold);
        std::vector<std::string> texts, gold;
        texts.reserve(held.size());
        gold.reserve(held.size());
        for (const auto& ex : held) {
            texts.push_back(ex.text);
            gold.push_back(ex.label);
        }
        auto predicted = model->predict(texts);

        auto cm = confusion(gold, predicted, schema);
        if (schema.positive_label) {
            record.scores.push_back(binary_f1(cm, *schema.positive_label));
        }
        record.scores.push_back(micro_f1(cm));
        record.degenerate_majority =
            is_majority_degenerate(predicted, subset_majority_label(subset, schema));

        auto pred_path = store.predictions_path(schema.task_id, fold, size, arm);
        std::vector<Prediction> preds;
        preds.reserve(held.size());
        for (std::size_t i = 0; i < held.size(); ++i) {
            preds.push_back({held[i].id, predicted[i]});
        }
        write_predictions(pred_path, preds);
        record.predictions_path = pred_path.filename().string();
    } catch (const std::exception& e) {
        record.failed = true;
        record.error = e.what();
        record.scores.clear();
        record.predictions_path.clear();
    }

    record.finished_at = detail::now_iso8601();
    return record;
}

CurveRunResult run_curve(const Corpus& corpus, const FoldPlan& plan,
                         const SubsampleSchedule& schedule, const TrainConfig& config,
                         const std::vector<Arm>& arms,
                         const std::optional<CheckpointRef>& warm_start, RunStore& store,
                         int jobs, CellProgress progress) {
    validate_plan(plan, corpus);
    schedule.validate();
    config.validate();
    if (arms.empty()) throw ValidationError("run_curve: no arms selected");
    for (Arm arm : arms) {
        if (arm == Arm::warm && !warm_start) {
            throw ValidationError("run_curve: warm arm selected without a checkpoint");
        }
    }
    lookup_backend(config.backend_id);  // fail before any training, not per cell

    struct Cell {
        int fold;
        std::size_t size;
        Arm arm;
    };
    std::vector<Cell> cells;
    cells.reserve(arms.size() * static_cast<std::size_t>(plan.k) * schedule.sizes.size());
    for (Arm arm : arms) {
        for (int fold = 0; fold < plan.k; ++fold) {
            for (std::size_t size : schedule.sizes) {
                cells.push_back({fold, size, arm});
            }
        }
    }

    // Resume: trust a cell only when its record matches the current
    // fingerprint and its predictions file survived.
    std::map<std::pair<std::string, std::pair<int, std::size_t>>, RunRecord> existing;
    for (Arm arm : arms) {
        for (auto& r : store.load(corpus.schema.task_id, arm)) {
            existing.insert_or_assign({arm_name(r.arm), {r.fold, r.train_size_requested}},
                                      std::move(r));
        }
    }

    CurveRunResult result;
    result.records.resize(cells.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& cell = cells[i];
        std::optional<CheckpointRef> warm =
            cell.arm == Arm::warm ? warm_start : std::optional<CheckpointRef>{};
        TrainConfig cell_config = config;
        cell_config.seed = cell_seed(config.seed, corpus.schema.task_id, cell.fold,
                                     cell.size, cell.arm);
        cell_config.init_checkpoint = warm;
        std::string fingerprint = cell_fingerprint(corpus, plan, cell.fold, cell.size,
                                                   cell.arm, cell_config, warm);
        auto it = existing.find({arm_name(cell.arm), {cell.fold, cell.size}});
        if (it != existing.end() && !it->second.failed &&
            it->second.config_fingerprint == fingerprint &&
            store.has_predictions(it->second)) {
            result.records[i] = it->second;
            ++result.skipped;
        } else {
            pending.push_back(i);
        }
    }

    auto execute = [&](std::size_t idx) {
        const Cell& cell = cells[idx];
        std::optional<CheckpointRef> warm =
            cell.arm == Arm::warm ? warm_start : std::optional<CheckpointRef>{};
        RunRecord record;
        try {
            record = run_cell(corpus, plan, cell.fold, cell.size, cell.arm, config, warm,
                              store);
            store.append(record);
        } catch (const std::exception& e) {
            // Exceptions must not escape a worker (run_cell already absorbs
            // training failures; this catches store I/O faults).
            record.task_id = corpus.schema.task_id;
            record.fold = cell.fold;
            record.train_size_requested = cell.size;
            record.arm = cell.arm;
            record.primary_metric = metric_name(corpus.schema.primary_metric);
            record.failed = true;
            record.error = e.what();
        }
        if (progress) progress(record);
        result.records[idx] = std::move(record);
    };

    if (jobs == 1 || pending.empty()) {
        for (std::size_t idx : pending) execute(idx);
    } else {
#ifdef _OPENMP
        if (jobs > 1) omp_set_num_threads(jobs);
        #pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pending.size()); ++p) {
            execute(pending[static_cast<std::size_t>(p)]);
        }
#else
        for (std::size_t idx : pending) execute(idx);
#endif
    }

    result.executed = pending.size();
    for (const auto& r : result.records) {
        if (r.failed) ++result.failed;
    }
    if (!pending.empty()) {
        for (Arm arm : arms) store.compact(corpus.schema.task_id, arm);
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const RunRecord& a, const RunRecord& b) {
                  auto ka = std::make_tuple(arm_name(a.arm), a.fold, a.train_size_requested);
                  auto kb = std::make_tuple(arm_name(b.arm), b.fold, b.train_size_requested);
                  return ka < kb;
              });
    return result;
}

CurveSummary summarize(const std::vector<RunRecord>& records) {
    if (records.empty()) throw ValidationError("summarize: no records");
    CurveSummary summary;
    summary.task_id = records.front().task_id;
    summary.primary_metric = records.front().primary_metric;

    std::map<std::pair<std::string, std::size_t>, std::vector<double>> cells;
    for (const auto& r : records) {
        if (r.task_id != summary.task_id) {
            throw ValidationError("summarize: mixed tasks ('" + summary.task_id + "' and '" +
                                  r.task_id + "')");
        }
        if (r.failed) {
            ++summary.failed_records;
            continue;
        }
        cells[{arm_name(r.arm), r.train_size_requested}].push_back(r.primary_value());
    }

    for (const auto& [key, values] : cells) {
        CurveCell cell;
        cell.arm = arm_from_name(key.first);
        cell.size = key.second;
        cell.folds = static_cast<int>(values.size());
        cell.min = values.front();
        cell.max = values.front();
        double sum = 0.0;
        for (double v : values) {
            cell.min = std::min(cell.min, v);
            cell.max = std::max(cell.max, v);
            sum += v;
        }
        cell.mean = sum / static_cast<double>(values.size());
        summary.cells.push_back(cell);
    }
    return summary;
}

CheckpointRef train_full(const Corpus& corpus, const TrainConfig& config,
                         const std::optional<CheckpointRef>& warm_start,
                         const std::filesystem::path& out_dir) {
    if (corpus.examples.empty()) throw ValidationError("train_full: empty corpus");
    TrainConfig full_config = config;
    full_config.init_checkpoint = warm_start;
    const Backend& backend = lookup_backend(full_config.backend_id);
    auto model = backend.train(corpus.examples, corpus.schema, full_config);
    return model->save(out_dir);
}

} // namespace curvecv

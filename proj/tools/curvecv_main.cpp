// curvecv - learning-curve cross-validation harness for text classifiers.
//
// Subcommands: ingest, run-curve, train-full, plot, score, ensemble.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvecv/backend.hpp"
#include "curvecv/corpus.hpp"
#include "curvecv/ensemble.hpp"
#include "curvecv/error.hpp"
#include "curvecv/folds.hpp"
#include "curvecv/metrics.hpp"
#include "curvecv/predictions.hpp"
#include "curvecv/report.hpp"
#include "curvecv/rng.hpp"
#include "curvecv/runner.hpp"

using namespace curvecv;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Flag-level mistakes, distinct from runtime failures so main can map
// them to exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::string store_root_or_fail(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("CURVECV_STORE"); env && *env) return env;
    throw UsageError("no run store: pass --store or set CURVECV_STORE");
}

int cmd_ingest(const std::vector<std::string>& inputs, const std::string& schema_arg,
               const std::string& out_path) {
    TaskSchema schema;
    try {
        schema = load_schema(schema_arg);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::vector<Corpus> parts;
    for (const auto& input : inputs) {
        parts.push_back(parse_tsv_file(input, schema));
    }
    MergeResult merged = merge_and_dedup(parts);
    for (const auto& warning : merged.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    save_corpus(merged.corpus, out_path, merged.removed);

    std::cout << "ingested " << merged.corpus.size() << " examples ("
              << merged.removed << " duplicates removed) -> " << out_path << "\n";
    for (const auto& [label, count] : class_counts(merged.corpus)) {
        std::cout << "  " << label << ": " << count << "\n";
    }
    return kExitOk;
}

void print_arm_table(const CurveSummary& summary) {
    for (const char* arm : {"plain", "warm"}) {
        bool printed_header = false;
        for (const auto& cell : summary.cells) {
            if (arm_name(cell.arm) != arm) continue;
            if (!printed_header) {
                std::printf("%s / %s / %s\n", summary.task_id.c_str(), arm,
                            summary.primary_metric.c_str());
                std::printf("  %8s  %5s  %8s  %8s  %8s\n", "size", "folds", "mean", "min",
                            "max");
                printed_header = true;
            }
            std::printf("  %8zu  %5d  %8s  %8s  %8s\n", cell.size, cell.folds,
                        format_score(cell.mean).c_str(), format_score(cell.min).c_str(),
                        format_score(cell.max).c_str());
        }
        if (printed_header) std::printf("\n");
    }
}

void progress_line(const RunRecord& r) {
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    if (r.failed) {
        std::fprintf(stderr, "[%s] fold %d size %zu %s: FAILED (%s)\n", r.task_id.c_str(),
                     r.fold, r.train_size_requested, arm_name(r.arm).c_str(),
                     r.error.c_str());
        return;
    }
    std::fprintf(stderr, "[%s] fold %d size %zu %s: %s=%s%s\n", r.task_id.c_str(), r.fold,
                 r.train_size_requested, arm_name(r.arm).c_str(), r.primary_metric.c_str(),
                 format_score(r.primary_value()).c_str(),
                 r.degenerate_majority ? " (majority-degenerate)" : "");
}

int cmd_run_curve(const std::string& corpus_path, int k, std::uint64_t seed,
                  const std::string& sizes_arg, const std::string& backend_id,
                  const std::string& arms_arg, const std::string& warm_from,
                  const std::string& store_arg, int jobs) {
    Corpus corpus = load_corpus(corpus_path);
    RunStore store(store_root_or_fail(store_arg));

    std::vector<Arm> arms;
    {
        std::string field;
        std::istringstream ss(arms_arg);
        while (std::getline(ss, field, ',')) {
            if (!field.empty()) arms.push_back(arm_from_name(field));
        }
    }
    if (arms.empty()) throw ValidationError("no arms selected");

    SubsampleSchedule schedule = sizes_arg.empty() ? SubsampleSchedule::default_schedule()
                                                   : SubsampleSchedule::parse(sizes_arg);

    std::optional<CheckpointRef> warm_start;
    if (!warm_from.empty()) warm_start = CheckpointRef::from_dir(warm_from);

    // The plan file is the sole source of randomness for a task: build it
    // once, then every later run (either arm) must read the same file.
    FoldPlan plan;
    auto plan_path = store.plan_path(corpus.schema.task_id);
    if (std::filesystem::exists(plan_path)) {
        plan = FoldPlan::load(plan_path);
        if (plan.k != k || plan.seed != seed) {
            throw Error("existing plan " + plan_path.string() + " has k=" +
                        std::to_string(plan.k) + " seed=" + std::to_string(plan.seed) +
                        "; refusing to re-randomize (delete it or match the flags)");
        }
        validate_plan(plan, corpus);
        std::fprintf(stderr, "reusing fold plan %s\n", plan_path.string().c_str());
    } else {
        plan = make_folds(corpus, k, seed);
        plan.save(plan_path);
        std::fprintf(stderr, "wrote fold plan %s\n", plan_path.string().c_str());
    }

    TrainConfig config;
    config.seed = seed;
    config.backend_id = backend_id;

    CurveRunResult result = run_curve(corpus, plan, schedule, config, arms, warm_start,
                                      store, jobs, &progress_line);
    std::fprintf(stderr, "cells: %zu executed, %zu reused, %zu failed\n", result.executed,
                 result.skipped, result.failed);

    print_arm_table(summarize(result.records));

    if (result.failed > 0) {
        std::cerr << "error: " << result.failed << " cell(s) failed\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_train_full(const std::string& corpus_path, const std::string& out_dir,
                   const std::string& backend_id, std::uint64_t seed,
                   const std::string& warm_from) {
    Corpus corpus = load_corpus(corpus_path);
    TrainConfig config;
    config.seed = seed;
    config.backend_id = backend_id;
    std::optional<CheckpointRef> warm_start;
    if (!warm_from.empty()) warm_start = CheckpointRef::from_dir(warm_from);

    CheckpointRef ref = train_full(corpus, config, warm_start, out_dir);
    std::cout << "checkpoint " << ref.path << " (backend " << ref.backend_id
              << ", config " << ref.config_fingerprint << ", " << corpus.size()
              << " training examples)\n";
    return kExitOk;
}

int cmd_predict(const std::string& checkpoint_dir, const std::string& in_path,
                const std::string& out_path) {
    CheckpointRef ref = CheckpointRef::from_dir(checkpoint_dir);
    auto model = lookup_backend(ref.backend_id).load(ref);

    // input: id \t text, or id \t text \t label with the label ignored
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + in_path);
    std::vector<std::string> ids, texts;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "id\ttext" || line == "id\ttext\tlabel") continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            auto pos = line.find('\t', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 2 && fields.size() != 3) {
            throw ParseError(in_path + ":" + std::to_string(line_no) +
                             ": expected 2 or 3 tab-separated columns, got " +
                             std::to_string(fields.size()));
        }
        ids.push_back(std::move(fields[0]));
        texts.push_back(std::move(fields[1]));
    }

    auto labels = model->predict(texts);
    std::vector<Prediction> preds;
    preds.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) preds.push_back({ids[i], labels[i]});
    write_predictions(out_path, preds);
    std::cout << "predicted " << preds.size() << " texts -> " << out_path << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& store_arg, const std::string& task_id,
             const std::string& csv_path, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    if (!csv_path.empty()) {
        // Re-render from a previously emitted CSV; byte-identical to the
        // original SVG for the same rows.
        auto rows = read_curve_csv(csv_path);
        std::string stem = std::filesystem::path(csv_path).stem().string();
        const std::string suffix = "_curve";
        std::string task = stem.size() > suffix.size() &&
                                   stem.compare(stem.size() - suffix.size(), suffix.size(),
                                                suffix) == 0
                               ? stem.substr(0, stem.size() - suffix.size())
                               : stem;
        auto svg_path = std::filesystem::path(out_dir) / (task + "_curve.svg");
        std::ofstream out(svg_path, std::ios::binary);
        out << render_curve_svg(rows, task);
        std::cout << "wrote " << svg_path.string() << "\n";
        return kExitOk;
    }

    RunStore store(store_root_or_fail(store_arg));
    auto records = store.load(task_id);
    if (records.empty()) {
        throw Error("no records for task '" + task_id + "' in store " +
                    store.root().string());
    }
    CurveSummary summary = summarize(records);
    CurveArtifact artifact = emit_curve_artifact(summary, out_dir);
    std::cout << "wrote " << artifact.csv_path.string() << "\n";
    std::cout << "wrote " << artifact.svg_path.string() << "\n";
    return kExitOk;
}

int cmd_score(const std::string& gold_path, const std::string& pred_path,
              const std::string& schema_arg) {
    TaskSchema schema;
    try {
        schema = load_schema(schema_arg);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    auto gold = read_gold(gold_path);
    auto pred = read_predictions(pred_path);

    std::map<std::string, std::string> pred_by_id;
    for (const auto& p : pred) {
        if (!pred_by_id.emplace(p.id, p.label).second) {
            throw ValidationError(pred_path + ": duplicate id '" + p.id + "'");
        }
    }

    std::vector<std::string> gold_labels, pred_labels, missing;
    std::set<std::string> gold_ids;
    for (const auto& g : gold) {
        if (!gold_ids.insert(g.id).second) {
            throw ValidationError(gold_path + ": duplicate id '" + g.id + "'");
        }
        auto resolved = schema.resolve_label(g.label);
        if (!resolved) {
            throw ValidationError(gold_path + ": unknown label '" + g.label + "'");
        }
        auto it = pred_by_id.find(g.id);
        if (it == pred_by_id.end()) {
            missing.push_back(g.id);
            continue;
        }
        auto resolved_pred = schema.resolve_label(it->second);
        if (!resolved_pred) {
            throw ValidationError(pred_path + ": unknown label '" + it->second + "'");
        }
        gold_labels.push_back(*resolved);
        pred_labels.push_back(*resolved_pred);
    }
    std::vector<std::string> extra;
    for (const auto& [id, label] : pred_by_id) {
        if (!gold_ids.count(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "id mismatch:";
        if (!missing.empty()) {
            msg += " missing from predictions:";
            for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
            if (missing.size() > 10) msg += " (+" + std::to_string(missing.size() - 10) + ")";
        }
        if (!extra.empty()) {
            msg += " absent from gold:";
            for (std::size_t i = 0; i < extra.size() && i < 10; ++i) msg += " " + extra[i];
            if (extra.size() > 10) msg += " (+" + std::to_string(extra.size() - 10) + ")";
        }
        throw ValidationError(msg);
    }

    auto cm = confusion(gold_labels, pred_labels, schema);
    json report;
    report["schema_id"] = schema.task_id;
    report["pairs"] = gold_labels.size();
    report["primary_metric"] = metric_name(schema.primary_metric);
    json scores = json::array();
    if (schema.positive_label) {
        Score s = binary_f1(cm, *schema.positive_label);
        scores.push_back({{"metric", "binary_f1"},
                          {"value", round_score(s.value)},
                          {"support", s.support}});
    }
    Score micro = micro_f1(cm);
    scores.push_back({{"metric", "micro_f1"},
                      {"value", round_score(micro.value)},
                      {"support", micro.support}});
    report["scores"] = std::move(scores);
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_ensemble(const std::vector<std::string>& pred_paths, const std::string& schema_arg,
                 const std::string& tie_rule_arg, const std::string& train_majority,
                 const std::string& out_path) {
    TaskSchema schema;
    try {
        schema = load_schema(schema_arg);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    VoteSet votes;
    votes.schema = schema;
    votes.tie_rule = tie_rule_from_name(tie_rule_arg);
    if (!train_majority.empty()) votes.train_majority = train_majority;

    // Member files must contain exactly the same ids; the first file's
    // order is the output order.
    std::vector<std::string> ids;
    json members = json::array();
    for (std::size_t m = 0; m < pred_paths.size(); ++m) {
        auto preds = read_predictions(pred_paths[m]);
        members.push_back({{"path", pred_paths[m]},
                           {"fingerprint", hex64(fnv1a64(
                                [&] {
                                    std::string blob;
                                    for (const auto& p : preds) {
                                        blob += p.id + "\t" + p.label + "\n";
                                    }
                                    return blob;
                                }()))}});
        if (m == 0) {
            std::vector<std::string> labels;
            for (const auto& p : preds) {
                ids.push_back(p.id);
                labels.push_back(p.label);
            }
            votes.members.push_back(std::move(labels));
            continue;
        }
        std::map<std::string, std::string> by_id;
        for (const auto& p : preds) by_id.emplace(p.id, p.label);
        if (by_id.size() != ids.size() || preds.size() != ids.size()) {
            throw ValidationError(pred_paths[m] + ": id set differs from " + pred_paths[0]);
        }
        std::vector<std::string> labels;
        labels.reserve(ids.size());
        for (const auto& id : ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                throw ValidationError(pred_paths[m] + ": missing id '" + id + "'");
            }
            labels.push_back(it->second);
        }
        votes.members.push_back(std::move(labels));
    }

    auto fused = majority_vote(votes);
    std::vector<Prediction> out;
    out.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], fused[i]});
    write_predictions(out_path, out);

    json manifest;
    manifest["schema_id"] = schema.task_id;
    manifest["tie_rule"] = tie_rule_name(votes.tie_rule);
    manifest["train_majority"] =
        votes.train_majority ? json(*votes.train_majority) : json(nullptr);
    manifest["members"] = std::move(members);
    std::ofstream mf(out_path + ".manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";

    std::cout << "fused " << pred_paths.size() << " members -> " << out_path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"learning-curve cross-validation harness for tweet classifiers"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "merge + dedup labeled TSV files");
    std::vector<std::string> ingest_inputs;
    std::string ingest_schema, ingest_out;
    ingest->add_option("inputs", ingest_inputs, "3-column TSV files (id, text, label)")
        ->required()
        ->expected(-1);
    ingest->add_option("--schema", ingest_schema, "schema id or schema JSON path")
        ->required();
    ingest->add_option("--out", ingest_out, "output corpus JSONL path")->required();

    // run-curve
    auto* run = app.add_subcommand("run-curve", "run the k-fold learning-curve protocol");
    std::string run_corpus, run_sizes, run_backend, run_arms = "plain", run_warm_from,
                run_store;
    int run_k = 5, run_jobs = 1;
    std::uint64_t run_seed = 13;
    run->add_option("--corpus", run_corpus, "ingested corpus JSONL")->required();
    run->add_option("--k", run_k, "fold count (default 5)");
    run->add_option("--seed", run_seed, "base seed (default 13)");
    run->add_option("--sizes", run_sizes, "comma list; default is the 16-size schedule");
    run->add_option("--backend", run_backend, "backend id (default nb-ref)");
    run->add_option("--arms", run_arms, "plain, warm, or plain,warm (default plain)");
    run->add_option("--warm-from", run_warm_from, "checkpoint dir for the warm arm");
    run->add_option("--store", run_store, "run store root (or CURVECV_STORE)");
    run->add_option("--jobs", run_jobs, "concurrent cells; 1 = serial (default)");

    // train-full
    auto* full = app.add_subcommand("train-full", "train one model on the whole corpus");
    std::string full_corpus, full_out, full_backend, full_warm_from;
    std::uint64_t full_seed = 13;
    full->add_option("--corpus", full_corpus, "ingested corpus JSONL")->required();
    full->add_option("--out", full_out, "checkpoint output directory")->required();
    full->add_option("--backend", full_backend, "backend id (default nb-ref)");
    full->add_option("--seed", full_seed, "seed (default 13)");
    full->add_option("--warm-from", full_warm_from, "checkpoint dir to warm-start from");

    // predict
    auto* predict = app.add_subcommand("predict", "label a TSV of texts with a checkpoint");
    std::string predict_ckpt, predict_in, predict_out;
    predict->add_option("--checkpoint", predict_ckpt, "checkpoint directory")->required();
    predict->add_option("--in", predict_in, "input TSV (id, text[, label])")->required();
    predict->add_option("--out", predict_out, "output predictions TSV")->required();

    // plot
    auto* plot = app.add_subcommand("plot", "emit curve CSV + SVG from a run store");
    std::string plot_store, plot_task, plot_csv, plot_out;
    plot->add_option("--store", plot_store, "run store root (or CURVECV_STORE)");
    plot->add_option("--task", plot_task, "task id to plot");
    plot->add_option("--csv", plot_csv, "re-render an existing curve CSV instead");
    plot->add_option("--out", plot_out, "output directory")->required();

    // score
    auto* score = app.add_subcommand("score", "score a prediction file against gold");
    std::string score_gold, score_pred, score_schema;
    score->add_option("--gold", score_gold, "gold TSV (2 or 3 columns)")->required();
    score->add_option("--pred", score_pred, "prediction TSV (id, label)")->required();
    score->add_option("--schema", score_schema, "schema id or schema JSON path")->required();

    // ensemble
    auto* ens = app.add_subcommand("ensemble", "majority-vote fusion of prediction files");
    std::vector<std::string> ens_preds;
    std::string ens_schema, ens_tie = "schema_order", ens_majority, ens_out;
    ens->add_option("preds", ens_preds, "member prediction TSVs")->required()->expected(-1);
    ens->add_option("--schema", ens_schema, "schema id or schema JSON path")->required();
    ens->add_option("--tie-rule", ens_tie, "schema_order (default) or train_majority");
    ens->add_option("--train-majority", ens_majority,
                    "majority label for the train_majority rule");
    ens->add_option("--out", ens_out, "fused output TSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(ingest)) {
            return cmd_ingest(ingest_inputs, ingest_schema, ingest_out);
        }
        if (app.got_subcommand(run)) {
            return cmd_run_curve(run_corpus, run_k, run_seed, run_sizes, run_backend,
                                 run_arms, run_warm_from, run_store, run_jobs);
        }
        if (app.got_subcommand(full)) {
            return cmd_train_full(full_corpus, full_out, full_backend, full_seed,
                                  full_warm_from);
        }
        if (app.got_subcommand(predict)) {
            return cmd_predict(predict_ckpt, predict_in, predict_out);
        }
        if (app.got_subcommand(plot)) {
            if (plot_csv.empty() && plot_task.empty()) {
                std::cerr << "error: plot needs --task (with --store) or --csv\n";
                return kExitUsage;
            }
            return cmd_plot(plot_store, plot_task, plot_csv, plot_out);
        }
        if (app.got_subcommand(score)) {
            return cmd_score(score_gold, score_pred, score_schema);
        }
        if (app.got_subcommand(ens)) {
            return cmd_ensemble(ens_preds, ens_schema, ens_tie, ens_majority, ens_out);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

#ifndef CURVECV_RUNNER_HPP
#define CURVECV_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "curvecv/backend.hpp"
#include "curvecv/corpus.hpp"
#include "curvecv/folds.hpp"
#include "curvecv/metrics.hpp"

namespace curvecv {

enum class Arm { plain, warm };

const std::string& arm_name(Arm arm);
Arm arm_from_name(const std::string& name);

// One (task, fold, train size, arm) training-and-evaluation cell.
struct RunRecord {
    std::string task_id;
    int fold = 0;
    std::size_t train_size_requested = 0;
    std::size_t train_size_actual = 0;
    Arm arm = Arm::plain;
    std::optional<std::string> warm_start_origin;       // origin task_id
    std::optional<std::string> warm_start_fingerprint;  // origin checkpoint fp
    std::string backend_id;
    std::uint64_t seed = 0;  // effective per-cell seed
    std::string primary_metric;
    std::vector<Score> scores;
    bool degenerate_majority = false;
    std::string predictions_path;  // relative to the store root
    std::string config_fingerprint;
    std::string started_at;
    std::string finished_at;
    bool failed = false;
    std::string error;

    std::string to_json_string() const;
    static RunRecord from_json_string(const std::string& line);

    double primary_value() const;  // throws if the primary score is absent
};

struct CurveCell {
    std::size_t size = 0;  // requested size, shared across folds
    Arm arm = Arm::plain;
    double mean = 0.0, min = 0.0, max = 0.0;
    int folds = 0;  // contributing (non-failed) records
};

struct CurveSummary {
    std::string task_id;
    std::string primary_metric;
    std::vector<CurveCell> cells;  // sorted by (arm, size)
    std::size_t failed_records = 0;
};

// On-disk layout under one root directory:
//   <task>_plan.json                    fold plan (sole source of randomness)
//   <task>_<arm>.jsonl                  RunRecords, one JSON object per line
//   <task>_<fold>_<size>_<arm>.tsv      per-cell predictions (submission format)
//   checkpoints/<name>/                 saved models
// Appends are serialized through one writer; a final compaction rewrites
// each records file sorted by (fold, size) with last-record-wins, so the
// store is deterministic no matter how many workers ran.
class RunStore {
public:
    explicit RunStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path records_path(const std::string& task_id, Arm arm) const;
    std::filesystem::path predictions_path(const std::string& task_id, int fold,
                                           std::size_t size, Arm arm) const;
    std::filesystem::path plan_path(const std::string& task_id) const;
    std::filesystem::path checkpoint_dir(const std::string& name) const;

    void append(const RunRecord& record);
    void compact(const std::string& task_id, Arm arm);

    // Last-record-wins view of one (task, arm) file; empty if absent.
    std::vector<RunRecord> load(const std::string& task_id, Arm arm) const;
    // Both arms, concatenated.
    std::vector<RunRecord> load(const std::string& task_id) const;

    bool has_predictions(const RunRecord& record) const;

private:
    std::filesystem::path root_;
    mutable std::mutex write_mutex_;
};

// Per-cell seed: cells are independent yet reproducible from the base
// seed alone.
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& task_id,
                        int fold, std::size_t size, Arm arm);

// Stable identity of a cell's full configuration (plan, corpus, config,
// warm-start). Matching fingerprints are what resume trusts.
std::string cell_fingerprint(const Corpus& corpus, const FoldPlan& plan, int fold,
                             std::size_t size, Arm arm, const TrainConfig& config,
                             const std::optional<CheckpointRef>& warm_start);

// Trains on train_subset(plan, fold, size) (warm-started when arm ==
// warm), predicts the held-out fold, scores with the schema's metrics,
// flags majority degeneracy, persists predictions into the store, and
// returns the record. Backend failures come back as a failed record with
// the error payload, never as partial scores. config.seed is treated as
// the base seed; the effective seed is derived per cell.
RunRecord run_cell(const Corpus& corpus, const FoldPlan& plan, int fold,
                   std::size_t size, Arm arm, const TrainConfig& config,
                   const std::optional<CheckpointRef>& warm_start, RunStore& store);

struct CurveRunResult {
    std::vector<RunRecord> records;  // every cell, sorted (arm, fold, size)
    std::size_t executed = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
};

using CellProgress = void (*)(const RunRecord&);

// The full protocol: one cell per (fold in plan) x (size in schedule) x
// (arm in arms). Cells whose record already matches its fingerprint and
// whose predictions file still exists are skipped, so re-running a
// finished store trains nothing. jobs == 1 runs the serial reference
// path; jobs != 1 runs cells concurrently (OpenMP), jobs <= 0 meaning
// "all cores". Throws ValidationError before any training when the plan
// does not match the corpus or the warm arm lacks a checkpoint.
CurveRunResult run_curve(const Corpus& corpus, const FoldPlan& plan,
                         const SubsampleSchedule& schedule, const TrainConfig& config,
                         const std::vector<Arm>& arms,
                         const std::optional<CheckpointRef>& warm_start, RunStore& store,
                         int jobs = 1, CellProgress progress = nullptr);

// Mean/min/max of the primary metric per (size, arm) cell across folds.
// Failed records are excluded and counted, never pooled. Throws
// ValidationError on an empty or mixed-task record list.
CurveSummary summarize(const std::vector<RunRecord>& records);

// One model on the entire pool, saved for test-set prediction or as a
// warm-start origin for the other task.
CheckpointRef train_full(const Corpus& corpus, const TrainConfig& config,
                         const std::optional<CheckpointRef>& warm_start,
                         const std::filesystem::path& out_dir);

} // namespace curvecv

#endif

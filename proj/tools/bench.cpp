// Benchmark: serial reference paths vs the OpenMP-parallel ones.
//
//   bench predict  - batch prediction over one trained model
//   bench curve    - full learning-curve run, jobs=1 vs jobs=N
//
// Both paths must produce identical outputs; the tests enforce that,
// this tool just reports the timings.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "curvecv/corpus.hpp"
#include "curvecv/folds.hpp"
#include "curvecv/naive_bayes.hpp"
#include "curvecv/rng.hpp"
#include "curvecv/runner.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace curvecv;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

// Two-class corpus with class-specific keywords plus shared filler.
Corpus synthetic_corpus(std::size_t n, std::uint64_t seed) {
    static const char* pos_words[] = {"fever", "cough", "sore", "throat", "tested"};
    static const char* neg_words[] = {"news", "report", "study", "vaccine", "policy"};
    static const char* filler[] = {"the", "a", "today", "covid", "and", "week", "still"};

    TaskSchema schema;
    schema.task_id = "bench-task";
    schema.labels = {"pos", "neg"};
    schema.positive_label = "pos";
    schema.primary_metric = Metric::binary_f1;

    Corpus corpus;
    corpus.schema = schema;
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        bool positive = rng.next_below(2) == 0;
        std::string text;
        for (int w = 0; w < 12; ++w) {
            if (w) text += ' ';
            if (rng.next_below(3) == 0) {
                text += positive ? pos_words[rng.next_below(5)] : neg_words[rng.next_below(5)];
            } else {
                text += filler[rng.next_below(7)];
            }
        }
        corpus.examples.push_back(
            {"b" + std::to_string(i), std::move(text), positive ? "pos" : "neg"});
    }
    return corpus;
}

int bench_predict() {
    const std::size_t train_n = 20000, predict_n = 50000;
    Corpus train_corpus = synthetic_corpus(train_n, 1);
    Corpus predict_corpus = synthetic_corpus(predict_n, 2);

    NaiveBayesBackend backend;
    TrainConfig config;
    config.seed = 1;
    auto model = backend.train(train_corpus.examples, train_corpus.schema, config);
    auto& nb = dynamic_cast<NaiveBayesModel&>(*model);

    std::vector<std::string> texts;
    texts.reserve(predict_n);
    for (const auto& ex : predict_corpus.examples) texts.push_back(ex.text);

    auto t0 = clock_type::now();
    auto serial = nb.predict_serial(texts);
    double serial_s = seconds_since(t0);

    t0 = clock_type::now();
    auto parallel = nb.predict(texts);
    double parallel_s = seconds_since(t0);

    if (serial != parallel) {
        std::fprintf(stderr, "FATAL: serial and parallel predictions differ\n");
        return 1;
    }

    std::printf("predict %zu texts (model: %zu training examples)\n", predict_n, train_n);
    std::printf("  serial    %8.3f s\n", serial_s);
    std::printf("  parallel  %8.3f s  (speedup %.2fx)\n", parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0);
    return 0;
}

int bench_curve() {
    Corpus corpus = synthetic_corpus(4000, 3);
    FoldPlan plan = make_folds(corpus, 5, 7);
    SubsampleSchedule schedule{{10, 50, 100, 250, 500, 1000, 2000, 3000}};
    TrainConfig config;
    config.seed = 7;

    int max_jobs = 1;
#ifdef _OPENMP
    max_jobs = omp_get_max_threads();
#endif

    double serial_s = 0.0;
    {
        std::filesystem::path root = std::filesystem::temp_directory_path() /
                                     "curvecv_bench_serial";
        std::filesystem::remove_all(root);
        RunStore store(root);
        auto t0 = clock_type::now();
        auto result = run_curve(corpus, plan, schedule, config, {Arm::plain}, std::nullopt,
                                store, 1);
        serial_s = seconds_since(t0);
        std::printf("curve 5x%zu cells, jobs=1:  %8.3f s (%zu executed)\n",
                    schedule.sizes.size(), serial_s, result.executed);
        std::filesystem::remove_all(root);
    }
    {
        std::filesystem::path root = std::filesystem::temp_directory_path() /
                                     "curvecv_bench_parallel";
        std::filesystem::remove_all(root);
        RunStore store(root);
        auto t0 = clock_type::now();
        auto result = run_curve(corpus, plan, schedule, config, {Arm::plain}, std::nullopt,
                                store, max_jobs);
        double parallel_s = seconds_since(t0);
        std::printf("curve 5x%zu cells, jobs=%d: %8.3f s (%zu executed, speedup %.2fx)\n",
                    schedule.sizes.size(), max_jobs, parallel_s, result.executed,
                    parallel_s > 0 ? serial_s / parallel_s : 0.0);
        std::filesystem::remove_all(root);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::string which = argc > 1 ? argv[1] : "all";
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; parallel paths run serially\n");
#endif
    int rc = 0;
    if (which == "predict" || which == "all") rc |= bench_predict();
    if (which == "curve" || which == "all") rc |= bench_curve();
    return rc;
}

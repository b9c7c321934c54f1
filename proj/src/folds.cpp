#include "curvecv/folds.hpp"

#include <algorithm>
#include <unordered_set>

#include <json.hpp>

#include "curvecv/error.hpp"
#include "curvecv/rng.hpp"
#include "detail.hpp"

namespace curvecv {

using nlohmann::json;

std::size_t FoldPlan::fold_size(int fold) const {
    std::size_t n = 0;
    for (const auto& [id, f] : assignment) {
        if (f == fold) ++n;
    }
    return n;
}

std::string FoldPlan::to_json_string() const {
    json j;
    j["seed"] = seed;
    j["k"] = k;
    j["generator"] = generator;
    json assign = json::object();
    for (const auto& [id, fold] : assignment) assign[id] = fold;
    j["assignment"] = std::move(assign);
    j["order"] = order;
    return j.dump();
}

FoldPlan FoldPlan::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("fold plan JSON: ") + e.what());
    }
    FoldPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.k = j.at("k").get<int>();
    plan.generator = j.at("generator").get<std::string>();
    if (plan.generator != generator_name()) {
        throw ValidationError("fold plan uses generator '" + plan.generator +
                              "'; this build only supports '" + generator_name() + "'");
    }
    for (const auto& [id, fold] : j.at("assignment").items()) {
        plan.assignment[id] = fold.get<int>();
    }
    plan.order = j.at("order").get<std::vector<std::vector<std::string>>>();
    if (static_cast<int>(plan.order.size()) != plan.k) {
        throw ValidationError("fold plan: order has " + std::to_string(plan.order.size()) +
                              " folds, expected " + std::to_string(plan.k));
    }
    return plan;
}

void FoldPlan::save(const std::filesystem::path& path) const {
    detail::write_file(path, to_json_string() + "\n");
}

FoldPlan FoldPlan::load(const std::filesystem::path& path) {
    return from_json_string(detail::read_file(path));
}

std::string FoldPlan::fingerprint() const {
    return hex64(fnv1a64(to_json_string()));
}

FoldPlan make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("make_folds: k must be >= 2, got " + std::to_string(k));
    if (corpus.size() < static_cast<std::size_t>(k)) {
        throw ValidationError("make_folds: corpus of " + std::to_string(corpus.size()) +
                              " examples cannot fill " + std::to_string(k) + " folds");
    }

    std::vector<std::string> ids;
    ids.reserve(corpus.size());
    {
        std::unordered_set<std::string_view> seen;
        seen.reserve(corpus.size());
        for (const auto& ex : corpus.examples) {
            if (!seen.insert(ex.id).second) {
                throw ValidationError("make_folds: duplicate id '" + ex.id + "'");
            }
            ids.push_back(ex.id);
        }
    }
    std::sort(ids.begin(), ids.end());
    seeded_shuffle(ids, seed);

    FoldPlan plan;
    plan.seed = seed;
    plan.k = k;
    plan.generator = generator_name();
    plan.assignment.reserve(ids.size());
    plan.order.resize(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        plan.order[static_cast<std::size_t>(f)].reserve(ids.size() - ids.size() / static_cast<std::size_t>(k));
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        int fold = static_cast<int>(i % static_cast<std::size_t>(k));
        plan.assignment.emplace(ids[i], fold);
        for (int f = 0; f < k; ++f) {
            if (f != fold) plan.order[static_cast<std::size_t>(f)].push_back(ids[i]);
        }
    }
    return plan;
}

void validate_plan(const FoldPlan& plan, const Corpus& corpus) {
    if (plan.assignment.size() != corpus.size()) {
        throw ValidationError("plan/corpus mismatch: plan covers " +
                              std::to_string(plan.assignment.size()) + " ids, corpus has " +
                              std::to_string(corpus.size()));
    }
    for (const auto& ex : corpus.examples) {
        if (!plan.assignment.count(ex.id)) {
            throw ValidationError("plan/corpus mismatch: corpus id '" + ex.id +
                                  "' missing from plan");
        }
    }
}

namespace {

void check_fold_index(const FoldPlan& plan, int fold, const char* op) {
    if (fold < 0 || fold >= plan.k) {
        throw ValidationError(std::string(op) + ": fold index " + std::to_string(fold) +
                              " out of range [0, " + std::to_string(plan.k) + ")");
    }
}

} // namespace

std::vector<LabeledExample> train_subset(const FoldPlan& plan, const Corpus& corpus,
                                         int held_out_fold, std::size_t size) {
    check_fold_index(plan, held_out_fold, "train_subset");
    if (size == 0) throw ValidationError("train_subset: size must be >= 1");

    std::unordered_map<std::string_view, const LabeledExample*> by_id;
    by_id.reserve(corpus.size());
    for (const auto& ex : corpus.examples) by_id.emplace(ex.id, &ex);

    const auto& ids = plan.order[static_cast<std::size_t>(held_out_fold)];
    std::size_t take = std::min(size, ids.size());
    std::vector<LabeledExample> subset;
    subset.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        auto it = by_id.find(ids[i]);
        if (it == by_id.end()) {
            throw ValidationError("train_subset: plan id '" + std::string(ids[i]) +
                                  "' missing from corpus");
        }
        subset.push_back(*it->second);
    }
    return subset;
}

std::vector<LabeledExample> held_out(const FoldPlan& plan, const Corpus& corpus,
                                     int fold) {
    check_fold_index(plan, fold, "held_out");
    std::vector<LabeledExample> out;
    for (const auto& ex : corpus.examples) {
        auto it = plan.assignment.find(ex.id);
        if (it == plan.assignment.end()) {
            throw ValidationError("held_out: corpus id '" + ex.id + "' missing from plan");
        }
        if (it->second == fold) out.push_back(ex);
    }
    return out;
}

void SubsampleSchedule::validate() const {
    if (sizes.empty()) throw ValidationError("schedule: no sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1) throw ValidationError("schedule: sizes must be >= 1");
        if (i > 0 && sizes[i] <= sizes[i - 1]) {
            throw ValidationError("schedule: sizes must be strictly increasing (" +
                                  std::to_string(sizes[i - 1]) + " then " +
                                  std::to_string(sizes[i]) + ")");
        }
    }
}

SubsampleSchedule SubsampleSchedule::default_schedule() {
    return SubsampleSchedule{{10, 50, 100, 175, 250, 500, 750, 1000, 1500, 2000, 3000,
                              4000, 5000, 6000, 7000, 8000}};
}

SubsampleSchedule SubsampleSchedule::parse(const std::string& comma_separated) {
    SubsampleSchedule schedule;
    for (const auto& field : detail::split(comma_separated, ',')) {
        if (field.empty()) throw ParseError("schedule: empty size in '" + comma_separated + "'");
        try {
            long long v = std::stoll(field);
            if (v < 1) throw ValidationError("schedule: sizes must be >= 1, got " + field);
            schedule.sizes.push_back(static_cast<std::size_t>(v));
        } catch (const std::invalid_argument&) {
            throw ParseError("schedule: not a number: '" + field + "'");
        } catch (const std::out_of_range&) {
            throw ParseError("schedule: size out of range: '" + field + "'");
        }
    }
    schedule.validate();
    return schedule;
}

} // namespace curvecv

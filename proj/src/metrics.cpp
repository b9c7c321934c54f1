#include "curvecv/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "curvecv/error.hpp"

namespace curvecv {

std::uint64_t ConfusionMatrix::at(int gold, int pred) const {
    return counts[static_cast<std::size_t>(gold) * schema.labels.size() +
                  static_cast<std::size_t>(pred)];
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
}

ConfusionMatrix confusion(const std::vector<std::string>& gold,
                          const std::vector<std::string>& pred,
                          const TaskSchema& schema) {
    if (gold.size() != pred.size()) {
        throw ValidationError("confusion: " + std::to_string(gold.size()) +
                              " gold labels vs " + std::to_string(pred.size()) +
                              " predictions");
    }
    ConfusionMatrix cm;
    cm.schema = schema;
    std::size_t k = schema.labels.size();
    cm.counts.assign(k * k, 0);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        int g = schema.label_index(gold[i]);
        if (g < 0) throw ValidationError("confusion: unknown gold label '" + gold[i] + "'");
        int p = schema.label_index(pred[i]);
        if (p < 0) {
            throw ValidationError("confusion: unknown predicted label '" + pred[i] + "'");
        }
        cm.counts[static_cast<std::size_t>(g) * k + static_cast<std::size_t>(p)] += 1;
    }
    return cm;
}

Score binary_f1(const ConfusionMatrix& cm, const std::string& positive) {
    int pos = cm.schema.label_index(positive);
    if (pos < 0) {
        throw ValidationError("binary_f1: positive label '" + positive +
                              "' not in schema '" + cm.schema.task_id + "'");
    }
    std::uint64_t tp = cm.at(pos, pos);
    std::uint64_t fp = 0, fn = 0;
    for (int l = 0; l < cm.num_labels(); ++l) {
        if (l == pos) continue;
        fp += cm.at(l, pos);
        fn += cm.at(pos, l);
    }

    Score score;
    score.metric = Metric::binary_f1;
    score.support = tp + fn;
    // Zero-denominator convention: any of TP+FP, TP+FN, P+R empty -> 0.0.
    if (tp + fp == 0 || tp + fn == 0) {
        score.value = 0.0;
        return score;
    }
    double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
    score.value = (p + r == 0.0) ? 0.0 : 2.0 * p * r / (p + r);
    return score;
}

Score micro_f1(const ConfusionMatrix& cm) {
    std::uint64_t total = cm.total();
    if (total == 0) throw ValidationError("micro_f1: empty confusion matrix");

    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (int l = 0; l < cm.num_labels(); ++l) {
        tp += cm.at(l, l);
        for (int m = 0; m < cm.num_labels(); ++m) {
            if (m == l) continue;
            fp += cm.at(m, l);
            fn += cm.at(l, m);
        }
    }

    Score score;
    score.metric = Metric::micro_f1;
    score.support = total;
    if (tp + fp == 0 || tp + fn == 0) {
        score.value = 0.0;
    } else if (tp + fp == tp + fn) {
        // Single-label prediction pools equal FP and FN, so P == R and the
        // harmonic mean is that common value; one division keeps it exact.
        score.value = static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
        double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
        double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
        score.value = (p + r == 0.0) ? 0.0 : 2.0 * p * r / (p + r);
    }
    return score;
}

bool is_majority_degenerate(const std::vector<std::string>& pred,
                            const std::string& train_majority) {
    for (const auto& label : pred) {
        if (label != train_majority) return false;
    }
    return true;
}

double round_score(double value) {
    return std::strtod(format_score(value).c_str(), nullptr);
}

std::string format_score(double value) {
    // glibc printf rounds ties to even; combined with strtod round-tripping
    // this keeps reported values bit-stable.
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

} // namespace curvecv

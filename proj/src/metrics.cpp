#include "vqc/metrics.hpp"

#include "vqc/errors.hpp"
#include "vqc/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace vqc {

double auc_ovr(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw InvalidArgument("auc: scores and labels differ in length");
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the mid-rank keeps everything integral: a tie group covering
    // 1-based ranks lo..hi has doubled mid-rank lo + hi.
    std::uint64_t positives = 0;
    std::uint64_t rank_sum2 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const std::uint64_t mid2 = (i + 1) + (j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] != 0) {
                ++positives;
                rank_sum2 += mid2;
            }
        }
        i = j + 1;
    }
    const std::uint64_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw UndefinedMetric("AUC needs at least one positive and one negative sample");
    }
    // 2U = 2*sum(ranks) - P(P+1)
    const std::uint64_t u2 = rank_sum2 - positives * (positives + 1);
    return static_cast<double>(u2) / (2.0 * static_cast<double>(positives * negatives));
}

namespace {
struct F1Result {
    double value;
    bool zero_denominator;
};

F1Result f1_impl(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                 std::size_t cls) {
    if (predictions.size() != truths.size()) {
        throw InvalidArgument("f1: predictions and truths differ in length (" +
                              std::to_string(predictions.size()) + " vs " +
                              std::to_string(truths.size()) + ")");
    }
    if (predictions.empty()) {
        throw InvalidArgument("f1: empty input");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool p = predictions[i] == cls;
        const bool t = truths[i] == cls;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
    }
    const std::size_t denom = 2 * tp + fp + fn;
    if (denom == 0) {
        return {0.0, true};
    }
    return {2.0 * static_cast<double>(tp) / static_cast<double>(denom), false};
}
} // namespace

double f1_per_class(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                    std::size_t cls) {
    return f1_impl(predictions, truths, cls).value;
}

EvalReport make_report(std::span<const Scores> scores, std::span<const std::size_t> truths,
                       const LabelMap &label_map) {
    if (scores.size() != truths.size()) {
        throw InvalidArgument("report: scores and truths differ in length");
    }
    if (scores.empty()) {
        throw InvalidArgument("report: empty dataset");
    }
    EvalReport report;
    report.label_map = label_map;
    report.n_samples = scores.size();

    std::vector<std::size_t> predictions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (truths[i] >= kNumClasses) {
            throw InvalidArgument("report: class index out of range");
        }
        predictions[i] = argmax(scores[i]);
        ++report.confusion[truths[i]][predictions[i]];
    }

    std::vector<double> column(scores.size());
    std::vector<int> binary(scores.size());
    double auc_sum = 0.0;
    double f1_sum = 0.0;
    std::size_t auc_count = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            column[i] = scores[i][c];
            binary[i] = truths[i] == c ? 1 : 0;
        }
        try {
            const double auc = auc_ovr(column, binary);
            report.per_class_auc[c] = auc;
            auc_sum += auc;
            ++auc_count;
        } catch (const UndefinedMetric &) {
            ++report.auc_excluded;
        }
        const F1Result f1 = f1_impl(predictions, truths, c);
        report.per_class_f1[c] = f1.value;
        report.f1_zero_denominator[c] = f1.zero_denominator;
        f1_sum += f1.value;
    }
    if (auc_count > 0) {
        report.macro_auc = auc_sum / static_cast<double>(auc_count);
    }
    report.macro_f1 = f1_sum / static_cast<double>(kNumClasses);
    return report;
}

EvalReport evaluate(const EnsembleModel &model, const Dataset &data, std::size_t workers) {
    model.validate();
    if (data.empty()) {
        throw InvalidArgument("evaluate: dataset is empty");
    }
    data.validate();
    if (data.feature_dim != model.encoding.input_dim) {
        throw InvalidArgument("evaluate: dataset has " + std::to_string(data.feature_dim) +
                              " features, model expects " +
                              std::to_string(model.encoding.input_dim));
    }
    std::vector<Scores> scores(data.size());
    std::vector<std::size_t> truths(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        truths[i] = model.class_index(data.samples[i].label);
    }
    parallel_for(data.size(), workers,
                 [&](std::size_t i) { scores[i] = score_all(model, data.samples[i].features); });
    return make_report(scores, truths, model.label_map);
}

std::string format_report(const EvalReport &report) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %8s %8s\n", "class", "AUC", "F1");
    out += buf;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const std::string name(to_string(report.label_map[c]));
        char auc[16];
        if (report.per_class_auc[c]) {
            std::snprintf(auc, sizeof auc, "%.4f", *report.per_class_auc[c]);
        } else {
            std::snprintf(auc, sizeof auc, "n/a");
        }
        std::snprintf(buf, sizeof buf, "%-12s %8s %8.4f%s\n", name.c_str(), auc,
                      report.per_class_f1[c], report.f1_zero_denominator[c] ? " (empty)" : "");
        out += buf;
    }
    char macro_auc[16];
    if (report.macro_auc) {
        std::snprintf(macro_auc, sizeof macro_auc, "%.4f", *report.macro_auc);
    } else {
        std::snprintf(macro_auc, sizeof macro_auc, "n/a");
    }
    std::snprintf(buf, sizeof buf, "%-12s %8s %8.4f\n", "macro", macro_auc, report.macro_f1);
    out += buf;
    if (report.auc_excluded > 0) {
        std::snprintf(buf, sizeof buf, "(%zu class(es) excluded from macro AUC)\n",
                      report.auc_excluded);
        out += buf;
    }
    out += "\nconfusion (rows = truth, cols = prediction)\n";
    std::snprintf(buf, sizeof buf, "%-12s", "");
    out += buf;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        std::snprintf(buf, sizeof buf, " %10s", std::string(to_string(report.label_map[c])).c_str());
        out += buf;
    }
    out += '\n';
    for (std::size_t r = 0; r < kNumClasses; ++r) {
        std::snprintf(buf, sizeof buf, "%-12s", std::string(to_string(report.label_map[r])).c_str());
        out += buf;
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            std::snprintf(buf, sizeof buf, " %10zu", report.confusion[r][c]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace vqc

/**
 * @file
 * Per-class and macro AUC / F1 for the four-class problem.
 *
 * AUC is one-vs-rest, ranking samples by the matching classifier's raw score,
 * with ties credited 0.5 (Mann-Whitney). F1 is computed from argmax
 * predictions. A class with no predicted and no true members gets F1 = 0 and
 * is flagged.
 */
#pragma once

#include "vqc/dataset.hpp"
#include "vqc/model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vqc {

/// Rank-based AUC. labels are 0/1; needs at least one of each, otherwise
/// UndefinedMetric.
double auc_ovr(std::span<const double> scores, std::span<const int> labels);

/// One-vs-rest F1 of `cls`.
double f1_per_class(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                    std::size_t cls);

struct EvalReport {
    LabelMap label_map = canonical_label_map();
    /// Absent when the class is missing (or is the only class) in the data.
    std::array<std::optional<double>, kNumClasses> per_class_auc{};
    std::array<double, kNumClasses> per_class_f1{};
    /// Set where F1 had a zero denominator and was reported as 0.
    std::array<bool, kNumClasses> f1_zero_denominator{};
    /// Mean over classes with a defined AUC; absent if none.
    std::optional<double> macro_auc;
    std::size_t auc_excluded = 0;
    double macro_f1 = 0.0;
    /// rows = truth, cols = prediction.
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};
    std::size_t n_samples = 0;
};

/// Builds a report from a score matrix (n x 4) and class indices.
EvalReport make_report(std::span<const Scores> scores, std::span<const std::size_t> truths,
                       const LabelMap &label_map = canonical_label_map());

EvalReport evaluate(const EnsembleModel &model, const Dataset &data, std::size_t workers = 1);

/// Human-readable table.
std::string format_report(const EvalReport &report);

} // namespace vqc

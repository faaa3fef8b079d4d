/**
 * @file
 * Feature CSV files, stratified splits, synthetic blobs and persistence of
 * models, reports and epoch logs.
 *
 * Feature CSV: header `f0,...,f{D-1},label`, one sample per row, `.` as the
 * decimal separator. Labels are case-insensitive none/control/infection/
 * ischaemia/both, with control read as none.
 */
#pragma once

#include "vqc/dataset.hpp"
#include "vqc/metrics.hpp"
#include "vqc/model.hpp"
#include "vqc/training.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vqc {

inline constexpr int kModelFormatVersion = 1;

Dataset load_csv(const std::filesystem::path &path);
Dataset parse_csv(const std::string &text, const std::string &provenance = "<memory>");

/// Feature rows without labels. A trailing `label` column, if present, is
/// read into `labels`.
struct FeatureTable {
    std::vector<std::vector<double>> rows;
    std::size_t feature_dim = 0;
    std::optional<std::vector<Label>> labels;
};
FeatureTable load_features_csv(const std::filesystem::path &path);

/// Shortest round-trip formatting, so load_csv(save_csv(d)) reproduces d exactly.
void save_csv(const Dataset &data, const std::filesystem::path &path);
std::string to_csv(const Dataset &data);

struct SplitResult {
    Dataset train;
    Dataset validation;
    Dataset test;
    std::vector<std::string> warnings;
};

/// Stratified three-way split. Part sizes match the overall fractions
/// (largest remainder); each class's share of a part is within one sample of
/// its proportional quota. Samples keep their original relative order.
SplitResult split(const Dataset &data, const std::array<double, 3> &fractions, std::uint64_t seed);

/// Four unit-variance Gaussian clusters. For feature_dim >= 4 the centers are
/// separation * e_{k * (feature_dim / 4)}; for 2 or 3 dims they sit on
/// directions 0, 45, 90 and 135 degrees in the first two coordinates.
/// Samples are emitted class by class.
Dataset synth_blobs(std::size_t n_per_class, std::size_t feature_dim, double separation,
                    std::uint64_t seed);

/// Cluster centers used by synth_blobs.
std::array<std::vector<double>, kNumClasses> blob_centers(std::size_t feature_dim,
                                                          double separation);

std::string model_to_string(const EnsembleModel &model);
EnsembleModel model_from_string(const std::string &text);
void save_model(const EnsembleModel &model, const std::filesystem::path &path);
EnsembleModel load_model(const std::filesystem::path &path);

std::string report_to_json(const EvalReport &report);
std::string epoch_record_to_json(const EpochRecord &record);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, const std::string &contents);
std::string read_file(const std::filesystem::path &path);

} // namespace vqc

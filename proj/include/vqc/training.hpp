/**
 * @file
 * Margin-loss training of the one-vs-all ensemble.
 *
 * Per-sample loss is w_y * sum_{i != y} max(0, s_i - s_y + margin) over the
 * four classifier scores. Score gradients come from the parameter-shift rule,
 * (s(a + pi/2) - s(a - pi/2)) / 2 per angle, chained through the hinge with
 * subgradient 0 at the kink.
 */
#pragma once

#include "vqc/dataset.hpp"
#include "vqc/model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace vqc {

enum class OptimizerKind { sgd, sgd_momentum, adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

struct EarlyStopping {
    std::size_t patience = 10;
    double min_delta = 0.0;
};

struct TrainConfig {
    double margin = 0.15;
    double learning_rate = 0.01;
    std::size_t batch_size = 16;
    std::size_t max_epochs = 100;
    std::uint64_t seed = 0;
    OptimizerKind optimizer = OptimizerKind::adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::optional<EarlyStopping> early_stopping;
    /// Loss weight per class, indexed like the model's label_map.
    std::array<double, kNumClasses> class_weights{1.0, 1.0, 1.0, 1.0};
    /// Threads for per-sample circuit evaluation. Results do not depend on it.
    std::size_t workers = 1;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;

    bool operator==(const EpochRecord &) const = default;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::size_t stopped_epoch = 0;
    std::size_t best_epoch = 0;
};

struct TrainResult {
    EnsembleModel model;
    TrainReport report;
};

struct LossAccuracy {
    double loss = 0.0;
    double accuracy = 0.0;
};

double margin_loss(const Scores &scores, std::size_t true_class, double margin,
                   double weight = 1.0);

/// d(margin_loss)/d(scores).
Scores margin_loss_score_grad(const Scores &scores, std::size_t true_class, double margin,
                              double weight = 1.0);

/// Parameter-shift gradient of one classifier's score. The bias entry, when
/// the classifier has one, is 1.
ModelParams score_gradient(const ModelParams &params, const StateVector &encoded,
                           std::size_t n_layers);

using EnsembleGradient = std::array<ModelParams, kNumClasses>;

/// Gradient of one sample's weighted margin loss with respect to every
/// classifier's parameters. Classifiers whose score does not enter an active
/// hinge get an exact zero gradient without circuit evaluations.
EnsembleGradient sample_loss_gradient(const EnsembleModel &model, const StateVector &encoded,
                                      std::size_t true_class, double margin, double weight);

/// Mean weighted margin loss and argmax accuracy over a dataset.
LossAccuracy evaluate_loss(const EnsembleModel &model, const Dataset &data, double margin,
                           const std::array<double, kNumClasses> &class_weights,
                           std::size_t workers = 1);

/// Concatenation of classifier 0..3 angles, each followed by its bias if present.
std::vector<double> flatten_params(const EnsembleModel &model);
void unflatten_params(EnsembleModel &model, std::span<const double> flat);
std::vector<double> flatten_gradient(const EnsembleGradient &grad);

class Optimizer {
  public:
    Optimizer(const TrainConfig &config, std::size_t n_params);
    void step(std::span<double> params, std::span<const double> grad);

  private:
    OptimizerKind kind_;
    double lr_, momentum_, beta1_, beta2_, epsilon_;
    std::vector<double> m_, v_;
    std::uint64_t t_ = 0;
};

/// Tracks validation loss and decides when to stop: an epoch improves if its
/// loss is below best - min_delta; training stops after `patience`
/// consecutive epochs without improvement.
class EarlyStopper {
  public:
    explicit EarlyStopper(EarlyStopping config) : config_(config) {}

    /// Returns true if this epoch is the new best.
    bool update(std::size_t epoch, double val_loss);
    bool should_stop() const noexcept { return stale_ >= config_.patience; }
    std::size_t best_epoch() const noexcept { return best_epoch_; }
    double best_loss() const noexcept { return best_loss_; }

  private:
    EarlyStopping config_;
    double best_loss_ = 0.0;
    std::size_t best_epoch_ = 0;
    std::size_t stale_ = 0;
};

/// Validation hook: returns the validation loss/accuracy of `model` after `epoch`.
using ValidationFn = std::function<LossAccuracy(const EnsembleModel &model, std::size_t epoch)>;
using EpochCallback = std::function<void(const EpochRecord &)>;

/// Mini-batch training from `initial`. With early stopping, returns the
/// snapshot of the best validation epoch; otherwise the final model.
TrainResult train(const Dataset &train_set, const Dataset &validation_set,
                  const TrainConfig &config, const EnsembleModel &initial,
                  const EpochCallback &on_epoch = {});

/// As above, with the validation metric supplied by `validate`.
TrainResult train(const Dataset &train_set, const ValidationFn &validate,
                  const TrainConfig &config, const EnsembleModel &initial,
                  const EpochCallback &on_epoch = {});

} // namespace vqc

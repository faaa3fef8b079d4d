#include "vqc/training.hpp"

#include "vqc/errors.hpp"
#include "vqc/parallel.hpp"
#include "vqc/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace vqc {

std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::sgd:
        return "sgd";
    case OptimizerKind::sgd_momentum:
        return "sgd_momentum";
    case OptimizerKind::adam:
        return "adam";
    }
    return "?";
}

OptimizerKind optimizer_from_string(std::string_view name) {
    if (name == "sgd") {
        return OptimizerKind::sgd;
    }
    if (name == "sgd_momentum" || name == "momentum") {
        return OptimizerKind::sgd_momentum;
    }
    if (name == "adam") {
        return OptimizerKind::adam;
    }
    throw InvalidArgument("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (!(margin >= 0.0) || !std::isfinite(margin)) {
        throw InvalidArgument("margin must be a finite value >= 0");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidArgument("learning_rate must be > 0");
    }
    if (batch_size == 0) {
        throw InvalidArgument("batch_size must be >= 1");
    }
    if (early_stopping) {
        if (early_stopping->patience == 0) {
            throw InvalidArgument("early stopping patience must be >= 1");
        }
        if (!(early_stopping->min_delta >= 0.0)) {
            throw InvalidArgument("early stopping min_delta must be >= 0");
        }
    }
    for (double w : class_weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw InvalidArgument("class weights must be finite and > 0");
        }
    }
    if (!(momentum >= 0.0 && momentum < 1.0) || !(beta1 >= 0.0 && beta1 < 1.0) ||
        !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
        throw InvalidArgument("optimizer hyperparameters out of range");
    }
}

double margin_loss(const Scores &scores, std::size_t true_class, double margin, double weight) {
    if (true_class >= kNumClasses) {
        throw InvalidArgument("true class index " + std::to_string(true_class) + " out of range");
    }
    // Hinge terms are formed as (s_i + margin) - s_y, which rounds hand-worked
    // decimal examples the way they are written down; the gradient uses the same form.
    double total = 0.0;
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        if (i != true_class) {
            total += std::max(0.0, (scores[i] + margin) - scores[true_class]);
        }
    }
    return weight * total;
}

Scores margin_loss_score_grad(const Scores &scores, std::size_t true_class, double margin,
                              double weight) {
    if (true_class >= kNumClasses) {
        throw InvalidArgument("true class index " + std::to_string(true_class) + " out of range");
    }
    Scores grad{};
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        if (i != true_class && (scores[i] + margin) - scores[true_class] > 0.0) {
            grad[i] += weight;
            grad[true_class] -= weight;
        }
    }
    return grad;
}

ModelParams score_gradient(const ModelParams &params, const StateVector &encoded,
                           std::size_t n_layers) {
    constexpr double shift = std::numbers::pi / 2;
    ModelParams grad{AngleTensor(params.angles.n_layers(), params.angles.n_qubits()),
                     params.bias ? std::optional<double>(1.0) : std::nullopt};
    // Shifted evaluations ignore the bias; it cancels in the difference.
    ModelParams shifted{params.angles, std::nullopt};
    auto flat = shifted.angles.flat();
    auto out = grad.angles.flat();
    for (std::size_t k = 0; k < flat.size(); ++k) {
        const double original = flat[k];
        flat[k] = original + shift;
        const double plus = score(shifted, encoded, n_layers);
        flat[k] = original - shift;
        const double minus = score(shifted, encoded, n_layers);
        flat[k] = original;
        out[k] = (plus - minus) / 2;
    }
    return grad;
}

EnsembleGradient sample_loss_gradient(const EnsembleModel &model, const StateVector &encoded,
                                      std::size_t true_class, double margin, double weight) {
    const Scores scores = score_encoded(model, encoded);
    const Scores upstream = margin_loss_score_grad(scores, true_class, margin, weight);
    EnsembleGradient grad;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const auto &params = model.classifiers[c];
        if (upstream[c] == 0.0) {
            grad[c] = ModelParams{AngleTensor(params.angles.n_layers(), params.angles.n_qubits()),
                                  params.bias ? std::optional<double>(0.0) : std::nullopt};
            continue;
        }
        grad[c] = score_gradient(params, encoded, model.n_layers);
        for (double &g : grad[c].angles.flat()) {
            g *= upstream[c];
        }
        if (grad[c].bias) {
            *grad[c].bias = upstream[c];
        }
    }
    return grad;
}

std::vector<double> flatten_params(const EnsembleModel &model) {
    std::vector<double> flat;
    for (const auto &p : model.classifiers) {
        flat.insert(flat.end(), p.angles.flat().begin(), p.angles.flat().end());
        if (p.bias) {
            flat.push_back(*p.bias);
        }
    }
    return flat;
}

void unflatten_params(EnsembleModel &model, std::span<const double> flat) {
    std::size_t pos = 0;
    for (auto &p : model.classifiers) {
        auto dst = p.angles.flat();
        if (pos + dst.size() > flat.size()) {
            throw InvalidArgument("unflatten_params: too few values");
        }
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), dst.size(), dst.begin());
        pos += dst.size();
        if (p.bias) {
            if (pos >= flat.size()) {
                throw InvalidArgument("unflatten_params: too few values");
            }
            *p.bias = flat[pos++];
        }
    }
    if (pos != flat.size()) {
        throw InvalidArgument("unflatten_params: too many values");
    }
}

std::vector<double> flatten_gradient(const EnsembleGradient &grad) {
    std::vector<double> flat;
    for (const auto &p : grad) {
        flat.insert(flat.end(), p.angles.flat().begin(), p.angles.flat().end());
        if (p.bias) {
            flat.push_back(*p.bias);
        }
    }
    return flat;
}

Optimizer::Optimizer(const TrainConfig &config, std::size_t n_params)
    : kind_(config.optimizer), lr_(config.learning_rate), momentum_(config.momentum),
      beta1_(config.beta1), beta2_(config.beta2), epsilon_(config.epsilon), m_(n_params, 0.0),
      v_(n_params, 0.0) {}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
        throw InvalidArgument("optimizer step: size mismatch");
    }
    ++t_;
    switch (kind_) {
    case OptimizerKind::sgd:
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= lr_ * grad[i];
        }
        break;
    case OptimizerKind::sgd_momentum:
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = momentum_ * m_[i] + grad[i];
            params[i] -= lr_ * m_[i];
        }
        break;
    case OptimizerKind::adam: {
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
            params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + epsilon_);
        }
        break;
    }
    }
}

bool EarlyStopper::update(std::size_t epoch, double val_loss) {
    if (best_epoch_ == 0 || val_loss < best_loss_ - config_.min_delta) {
        best_loss_ = val_loss;
        best_epoch_ = epoch;
        stale_ = 0;
        return true;
    }
    ++stale_;
    return false;
}

namespace {

std::vector<StateVector> encode_all(const Dataset &data, const EncodingConfig &encoding,
                                    std::size_t workers) {
    std::vector<StateVector> states(data.size(), StateVector(1));
    parallel_for(data.size(), workers,
                 [&](std::size_t i) { states[i] = encode(data.samples[i].features, encoding); });
    return states;
}

std::vector<std::size_t> class_indices(const Dataset &data, const EnsembleModel &model) {
    std::vector<std::size_t> ys(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        ys[i] = model.class_index(data.samples[i].label);
    }
    return ys;
}

LossAccuracy loss_accuracy(const EnsembleModel &model, std::span<const StateVector> states,
                           std::span<const std::size_t> ys, double margin,
                           const std::array<double, kNumClasses> &weights, std::size_t workers) {
    std::vector<double> losses(states.size());
    std::vector<char> correct(states.size());
    parallel_for(states.size(), workers, [&](std::size_t i) {
        const Scores s = score_encoded(model, states[i]);
        losses[i] = margin_loss(s, ys[i], margin, weights[ys[i]]);
        correct[i] = argmax(s) == ys[i];
    });
    const double total = std::accumulate(losses.begin(), losses.end(), 0.0);
    const auto hits = std::count(correct.begin(), correct.end(), char{1});
    const auto n = static_cast<double>(states.size());
    return {total / n, static_cast<double>(hits) / n};
}

void check_dataset(const Dataset &data, const EnsembleModel &model, const char *what) {
    if (data.empty()) {
        throw InvalidArgument(std::string(what) + " set is empty");
    }
    data.validate();
    if (data.feature_dim != model.encoding.input_dim) {
        throw InvalidArgument(std::string(what) + " set has " + std::to_string(data.feature_dim) +
                              " features, model expects " +
                              std::to_string(model.encoding.input_dim));
    }
}

} // namespace

LossAccuracy evaluate_loss(const EnsembleModel &model, const Dataset &data, double margin,
                           const std::array<double, kNumClasses> &class_weights,
                           std::size_t workers) {
    check_dataset(data, model, "evaluation");
    const auto states = encode_all(data, model.encoding, workers);
    const auto ys = class_indices(data, model);
    return loss_accuracy(model, states, ys, margin, class_weights, workers);
}

TrainResult train(const Dataset &train_set, const Dataset &validation_set,
                  const TrainConfig &config, const EnsembleModel &initial,
                  const EpochCallback &on_epoch) {
    initial.validate();
    check_dataset(validation_set, initial, "validation");
    const auto states = encode_all(validation_set, initial.encoding, config.workers);
    const auto ys = class_indices(validation_set, initial);
    ValidationFn validate = [&](const EnsembleModel &model, std::size_t) {
        return loss_accuracy(model, states, ys, config.margin, config.class_weights,
                             config.workers);
    };
    return train(train_set, validate, config, initial, on_epoch);
}

TrainResult train(const Dataset &train_set, const ValidationFn &validate,
                  const TrainConfig &config, const EnsembleModel &initial,
                  const EpochCallback &on_epoch) {
    config.validate();
    initial.validate();
    check_dataset(train_set, initial, "training");

    TrainResult result{initial, {}};
    result.model.lineage.train_seed = config.seed;
    if (config.max_epochs == 0) {
        result.model = initial;
        return result;
    }

    const auto states = encode_all(train_set, initial.encoding, config.workers);
    const auto ys = class_indices(train_set, initial);

    EnsembleModel &model = result.model;
    std::vector<double> params = flatten_params(model);
    Optimizer optimizer(config, params.size());
    Rng rng(config.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::optional<EarlyStopper> stopper;
    if (config.early_stopping) {
        stopper.emplace(*config.early_stopping);
    }
    EnsembleModel best = model;
    double best_val = 0.0;

    std::vector<std::vector<double>> sample_grads;
    std::vector<double> batch_grad(params.size());

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
            const std::size_t count = std::min(config.batch_size, order.size() - start);
            sample_grads.resize(count);
            parallel_for(count, config.workers, [&](std::size_t j) {
                const std::size_t i = order[start + j];
                sample_grads[j] = flatten_gradient(sample_loss_gradient(
                    model, states[i], ys[i], config.margin, config.class_weights[ys[i]]));
            });
            // Fixed-order reduction keeps results independent of worker count.
            std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
            for (std::size_t j = 0; j < count; ++j) {
                for (std::size_t k = 0; k < batch_grad.size(); ++k) {
                    batch_grad[k] += sample_grads[j][k];
                }
            }
            for (double &g : batch_grad) {
                g /= static_cast<double>(count);
                if (!std::isfinite(g)) {
                    throw NumericalFailure("non-finite gradient at epoch " + std::to_string(epoch) +
                                           ", batch " + std::to_string(batch_no));
                }
            }
            optimizer.step(params, batch_grad);
            unflatten_params(model, params);
        }

        const LossAccuracy tr =
            loss_accuracy(model, states, ys, config.margin, config.class_weights, config.workers);
        const LossAccuracy va = validate(model, epoch);
        if (!std::isfinite(tr.loss) || !std::isfinite(va.loss)) {
            throw NumericalFailure("non-finite loss at epoch " + std::to_string(epoch) +
                                   " (train " + std::to_string(tr.loss) + ", validation " +
                                   std::to_string(va.loss) + ")");
        }
        const EpochRecord record{epoch, tr.loss, tr.accuracy, va.loss, va.accuracy};
        result.report.epochs.push_back(record);
        result.report.stopped_epoch = epoch;
        if (on_epoch) {
            on_epoch(record);
        }

        if (stopper) {
            if (stopper->update(epoch, va.loss)) {
                best = model;
            }
            result.report.best_epoch = stopper->best_epoch();
            if (stopper->should_stop()) {
                break;
            }
        } else if (result.report.best_epoch == 0 || va.loss < best_val) {
            best_val = va.loss;
            result.report.best_epoch = epoch;
        }
    }

    if (stopper) {
        result.model = best;
    }
    return result;
}

} // namespace vqc

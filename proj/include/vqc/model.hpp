/**
 * @file
 * The variational classifier: layered Rot + CNOT-ring circuits, one per
 * class, combined one-vs-all.
 *
 * A layer applies Rot(phi, theta, omega) to every qubit and then the ring
 * CNOT(q, q+1 mod n) for q = 0..n-1 (no ring on a single qubit). A
 * classifier's score is <Z> on qubit 0 after all layers, plus an optional bias.
 */
#pragma once

#include "vqc/encoding.hpp"
#include "vqc/statevector.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace vqc {

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::size_t kDefaultLayers = 6;

enum class Label : std::uint8_t { none = 0, infection = 1, ischaemia = 2, both = 3 };

std::string_view to_string(Label label);
/// Case-insensitive; "control" is accepted as an alias of none.
Label label_from_string(std::string_view name);

using LabelMap = std::array<Label, kNumClasses>;
using Scores = std::array<double, kNumClasses>;

constexpr LabelMap canonical_label_map() {
    return {Label::none, Label::infection, Label::ischaemia, Label::both};
}

/// Rotation angles of one classifier, laid out [layer][qubit][phi, theta, omega].
class AngleTensor {
  public:
    AngleTensor() = default;
    AngleTensor(std::size_t n_layers, std::size_t n_qubits, double fill = 0.0)
        : n_layers_(n_layers), n_qubits_(n_qubits), data_(n_layers * n_qubits * 3, fill) {}

    std::size_t n_layers() const noexcept { return n_layers_; }
    std::size_t n_qubits() const noexcept { return n_qubits_; }
    std::size_t size() const noexcept { return data_.size(); }

    double &at(std::size_t layer, std::size_t qubit, std::size_t k) {
        return data_[index(layer, qubit, k)];
    }
    double at(std::size_t layer, std::size_t qubit, std::size_t k) const {
        return data_[index(layer, qubit, k)];
    }
    RotationAngles rotation(std::size_t layer, std::size_t qubit) const {
        const std::size_t i = index(layer, qubit, 0);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    /// Angles of one layer, n_qubits * 3 values.
    std::span<const double> layer(std::size_t l) const {
        return std::span<const double>(data_).subspan(l * n_qubits_ * 3, n_qubits_ * 3);
    }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }

    bool operator==(const AngleTensor &) const = default;

  private:
    std::size_t index(std::size_t layer, std::size_t qubit, std::size_t k) const {
        return (layer * n_qubits_ + qubit) * 3 + k;
    }

    std::size_t n_layers_ = 0;
    std::size_t n_qubits_ = 0;
    std::vector<double> data_;
};

struct ModelParams {
    AngleTensor angles;
    std::optional<double> bias;

    bool operator==(const ModelParams &) const = default;
};

/// Seeds that produced a model, recorded in the model file.
struct Lineage {
    std::optional<std::uint64_t> init_seed;
    std::optional<std::uint64_t> train_seed;

    bool operator==(const Lineage &) const = default;
};

/// Four one-vs-all classifiers. Classifier i scores class label_map[i].
struct EnsembleModel {
    std::array<ModelParams, kNumClasses> classifiers;
    EncodingConfig encoding;
    std::size_t n_layers = kDefaultLayers;
    LabelMap label_map = canonical_label_map();
    Lineage lineage;

    /// Checks shapes, finiteness and label_map distinctness.
    void validate() const;
    /// Position of `label` in label_map.
    std::size_t class_index(Label label) const;

    bool operator==(const EnsembleModel &) const = default;
};

/// Small random angles, uniform in [-init_scale, init_scale].
EnsembleModel init_ensemble(const EncodingConfig &encoding, std::size_t n_layers,
                            std::uint64_t seed, bool with_bias = false,
                            double init_scale = 0.1);

/// One variational layer: Rot per qubit, then the CNOT ring.
void apply_layer(StateVector &state, std::span<const double> layer_angles);

/// Gate list of the full variational circuit described by `angles`.
Circuit build_circuit(const AngleTensor &angles);

double score(const ModelParams &params, const StateVector &encoded, std::size_t n_layers);

Scores score_encoded(const EnsembleModel &model, const StateVector &encoded);
Scores score_all(const EnsembleModel &model, std::span<const double> features);

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax(const Scores &scores);
std::size_t predict(const EnsembleModel &model, std::span<const double> features);

} // namespace vqc

#include "vqc/model.hpp"

#include "vqc/errors.hpp"
#include "vqc/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace vqc {

std::string_view to_string(Label label) {
    switch (label) {
    case Label::none:
        return "none";
    case Label::infection:
        return "infection";
    case Label::ischaemia:
        return "ischaemia";
    case Label::both:
        return "both";
    }
    return "?";
}

Label label_from_string(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "none" || lower == "control") {
        return Label::none;
    }
    if (lower == "infection") {
        return Label::infection;
    }
    if (lower == "ischaemia") {
        return Label::ischaemia;
    }
    if (lower == "both") {
        return Label::both;
    }
    throw InvalidArgument("unknown label '" + std::string(name) + "'");
}

void EnsembleModel::validate() const {
    encoding.validate();
    if (n_layers == 0) {
        throw InvalidArgument("model needs at least one layer");
    }
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        for (std::size_t j = i + 1; j < kNumClasses; ++j) {
            if (label_map[i] == label_map[j]) {
                throw InvalidArgument("label_map entries must be distinct");
            }
        }
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const auto &p = classifiers[c];
        if (p.angles.n_layers() != n_layers || p.angles.n_qubits() != encoding.n_qubits) {
            throw InvalidArgument("classifier " + std::to_string(c) + " has angle tensor " +
                                  std::to_string(p.angles.n_layers()) + "x" +
                                  std::to_string(p.angles.n_qubits()) + "x3, expected " +
                                  std::to_string(n_layers) + "x" +
                                  std::to_string(encoding.n_qubits) + "x3");
        }
        for (double a : p.angles.flat()) {
            if (!std::isfinite(a)) {
                throw InvalidArgument("classifier " + std::to_string(c) + " has a non-finite angle");
            }
        }
        if (p.bias && !std::isfinite(*p.bias)) {
            throw InvalidArgument("classifier " + std::to_string(c) + " has a non-finite bias");
        }
    }
}

std::size_t EnsembleModel::class_index(Label label) const {
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        if (label_map[i] == label) {
            return i;
        }
    }
    throw InvalidArgument("label '" + std::string(to_string(label)) + "' missing from label_map");
}

EnsembleModel init_ensemble(const EncodingConfig &encoding, std::size_t n_layers,
                            std::uint64_t seed, bool with_bias, double init_scale) {
    encoding.validate();
    if (n_layers == 0) {
        throw InvalidArgument("model needs at least one layer");
    }
    EnsembleModel model;
    model.encoding = encoding;
    model.n_layers = n_layers;
    model.lineage.init_seed = seed;
    Rng rng(seed);
    for (auto &p : model.classifiers) {
        p.angles = AngleTensor(n_layers, encoding.n_qubits);
        for (double &a : p.angles.flat()) {
            a = rng.uniform(-init_scale, init_scale);
        }
        if (with_bias) {
            p.bias = 0.0;
        }
    }
    return model;
}

void apply_layer(StateVector &state, std::span<const double> layer_angles) {
    const std::size_t n = state.n_qubits();
    if (layer_angles.size() != n * 3) {
        throw InvalidArgument("layer expects " + std::to_string(n * 3) + " angles, got " +
                              std::to_string(layer_angles.size()));
    }
    for (std::size_t q = 0; q < n; ++q) {
        state.apply_rot(q, {layer_angles[3 * q], layer_angles[3 * q + 1], layer_angles[3 * q + 2]});
    }
    if (n > 1) {
        for (std::size_t q = 0; q < n; ++q) {
            state.apply_cnot(q, (q + 1) % n);
        }
    }
}

Circuit build_circuit(const AngleTensor &angles) {
    const std::size_t n = angles.n_qubits();
    Circuit circuit;
    circuit.reserve(angles.n_layers() * n * 2);
    for (std::size_t l = 0; l < angles.n_layers(); ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            circuit.push_back(Gate::rot(q, angles.rotation(l, q)));
        }
        if (n > 1) {
            for (std::size_t q = 0; q < n; ++q) {
                circuit.push_back(Gate::cnot(q, (q + 1) % n));
            }
        }
    }
    return circuit;
}

double score(const ModelParams &params, const StateVector &encoded, std::size_t n_layers) {
    if (params.angles.n_layers() != n_layers || params.angles.n_qubits() != encoded.n_qubits()) {
        throw InvalidArgument("score: parameters shaped " + std::to_string(params.angles.n_layers()) +
                              "x" + std::to_string(params.angles.n_qubits()) +
                              "x3 do not match " + std::to_string(n_layers) + " layers on " +
                              std::to_string(encoded.n_qubits()) + " qubits");
    }
    StateVector state = encoded;
    state.apply(build_circuit(params.angles));
    return state.expectation_z(0) + params.bias.value_or(0.0);
}

Scores score_encoded(const EnsembleModel &model, const StateVector &encoded) {
    Scores s{};
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        s[c] = score(model.classifiers[c], encoded, model.n_layers);
    }
    return s;
}

Scores score_all(const EnsembleModel &model, std::span<const double> features) {
    return score_encoded(model, encode(features, model.encoding));
}

std::size_t argmax(const Scores &scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return best;
}

std::size_t predict(const EnsembleModel &model, std::span<const double> features) {
    return argmax(score_all(model, features));
}

} // namespace vqc

#include "vqc/encoding.hpp"

#include "vqc/errors.hpp"

#include <cmath>
#include <vector>

namespace vqc {

std::string_view to_string(EncodingScheme scheme) {
    return scheme == EncodingScheme::amplitude ? "amplitude" : "angle";
}

EncodingScheme encoding_scheme_from_string(std::string_view name) {
    if (name == "amplitude") {
        return EncodingScheme::amplitude;
    }
    if (name == "angle") {
        return EncodingScheme::angle;
    }
    throw InvalidArgument("unknown encoding scheme '" + std::string(name) + "'");
}

void EncodingConfig::validate() const {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw InvalidArgument("encoding n_qubits must be in 1.." + std::to_string(kMaxQubits) +
                              ", got " + std::to_string(n_qubits));
    }
    if (input_dim == 0) {
        throw InvalidArgument("encoding input_dim must be positive");
    }
    if (!std::isfinite(pad_value)) {
        throw InvalidArgument("encoding pad_value must be finite");
    }
    if (scheme == EncodingScheme::amplitude && input_dim > (std::size_t{1} << n_qubits)) {
        throw InvalidArgument("amplitude encoding of " + std::to_string(input_dim) +
                              " features needs at least " +
                              std::to_string(qubits_for_amplitude(input_dim)) + " qubits, got " +
                              std::to_string(n_qubits));
    }
    if (scheme == EncodingScheme::angle && input_dim > n_qubits) {
        throw InvalidArgument("angle encoding of " + std::to_string(input_dim) +
                              " features needs at least that many qubits, got " +
                              std::to_string(n_qubits));
    }
}

std::size_t qubits_for_amplitude(std::size_t input_dim) {
    std::size_t n = 1;
    while ((std::size_t{1} << n) < input_dim) {
        ++n;
    }
    return n;
}

StateVector encode(std::span<const double> features, const EncodingConfig &config) {
    config.validate();
    if (features.size() != config.input_dim) {
        throw InvalidArgument("feature vector has length " + std::to_string(features.size()) +
                              ", encoding expects " + std::to_string(config.input_dim));
    }
    for (double f : features) {
        if (!std::isfinite(f)) {
            throw InvalidArgument("feature vector contains a non-finite value");
        }
    }

    if (config.scheme == EncodingScheme::angle) {
        StateVector state(config.n_qubits);
        for (std::size_t j = 0; j < features.size(); ++j) {
            state.apply_ry(j, features[j]);
        }
        return state;
    }

    const std::size_t dim = std::size_t{1} << config.n_qubits;
    std::vector<double> padded(dim, config.pad_value);
    std::copy(features.begin(), features.end(), padded.begin());
    double norm2 = 0.0;
    for (double v : padded) {
        norm2 += v * v;
    }
    if (norm2 == 0.0) {
        throw DegenerateInput("cannot amplitude-encode an all-zero feature vector");
    }
    const double norm = std::sqrt(norm2);
    std::vector<Complex> amps(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        amps[i] = Complex{padded[i] / norm, 0.0};
    }
    return StateVector::from_amplitudes(std::move(amps));
}

} // namespace vqc

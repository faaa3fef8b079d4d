#pragma once

#include "vqc/statevector.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace vqc {

enum class EncodingScheme { amplitude, angle };

std::string_view to_string(EncodingScheme scheme);
EncodingScheme encoding_scheme_from_string(std::string_view name);

/// How a feature vector becomes the circuit's input state.
///
/// amplitude: features padded to 2^n_qubits with pad_value, L2-normalized and
/// loaded as real amplitudes. angle: feature j drives RY(features[j]) on qubit j.
struct EncodingConfig {
    EncodingScheme scheme = EncodingScheme::amplitude;
    std::size_t n_qubits = 7;
    std::size_t input_dim = 128;
    double pad_value = 0.0;

    /// Throws InvalidArgument if the scheme cannot hold input_dim features.
    void validate() const;

    bool operator==(const EncodingConfig &) const = default;
};

/// Smallest qubit count whose amplitude space holds `input_dim` features.
std::size_t qubits_for_amplitude(std::size_t input_dim);

StateVector encode(std::span<const double> features, const EncodingConfig &config);

} // namespace vqc

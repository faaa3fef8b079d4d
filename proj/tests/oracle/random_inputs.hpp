// Seeded random states and circuits shared by the unit and acceptance tests.
#pragma once

#include "vqc/rng.hpp"
#include "vqc/statevector.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace vqc::testing {

inline StateVector random_state(std::size_t n_qubits, Rng &rng) {
    std::vector<Complex> amps(std::size_t{1} << n_qubits);
    double norm2 = 0.0;
    for (auto &a : amps) {
        a = Complex{rng.normal(), rng.normal()};
        norm2 += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm2);
    }
    return StateVector::from_amplitudes(std::move(amps));
}

inline double random_angle(Rng &rng) { return rng.uniform(-2 * std::numbers::pi, 2 * std::numbers::pi); }

inline Circuit random_circuit(std::size_t n_qubits, std::size_t n_gates, Rng &rng) {
    Circuit c;
    for (std::size_t i = 0; i < n_gates; ++i) {
        const auto q = static_cast<std::size_t>(rng.below(n_qubits));
        const auto kind = n_qubits > 1 ? rng.below(5) : rng.below(4);
        switch (kind) {
        case 0:
            c.push_back(Gate::rx(q, random_angle(rng)));
            break;
        case 1:
            c.push_back(Gate::ry(q, random_angle(rng)));
            break;
        case 2:
            c.push_back(Gate::rz(q, random_angle(rng)));
            break;
        case 3:
            c.push_back(Gate::rot(q, {random_angle(rng), random_angle(rng), random_angle(rng)}));
            break;
        default: {
            auto t = static_cast<std::size_t>(rng.below(n_qubits - 1));
            if (t >= q) {
                ++t;
            }
            c.push_back(Gate::cnot(q, t));
        }
        }
    }
    return c;
}

} // namespace vqc::testing

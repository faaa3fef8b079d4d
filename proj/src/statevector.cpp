#include "vqc/statevector.hpp"

#include "vqc/errors.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

namespace vqc {

namespace {
constexpr Complex kI{0.0, 1.0};

std::size_t bit_of(std::size_t n_qubits, std::size_t qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}
} // namespace

Matrix2 rx_matrix(double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    return {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}};
}

Matrix2 ry_matrix(double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    return {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}};
}

Matrix2 rz_matrix(double angle) {
    return {std::exp(-kI * (angle / 2)), Complex{0, 0}, Complex{0, 0}, std::exp(kI * (angle / 2))};
}

Matrix2 rot_matrix(const RotationAngles &a) {
    const double c = std::cos(a.theta / 2), s = std::sin(a.theta / 2);
    const double sum = (a.phi + a.omega) / 2;
    const double diff = (a.phi - a.omega) / 2;
    return {std::exp(-kI * sum) * c, -std::exp(kI * diff) * s, std::exp(-kI * diff) * s,
            std::exp(kI * sum) * c};
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw UnsupportedSize("StateVector supports 1.." + std::to_string(kMaxQubits) +
                              " qubits, got " + std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, Complex{0, 0});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t n_qubits, std::vector<Complex> amps)
    : n_qubits_(n_qubits), amps_(std::move(amps)) {}

StateVector StateVector::from_amplitudes(std::vector<Complex> amps) {
    const std::size_t dim = amps.size();
    if (dim < 2 || !std::has_single_bit(dim)) {
        throw InvalidArgument("amplitude count must be a power of two >= 2, got " +
                              std::to_string(dim));
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(dim));
    if (n > kMaxQubits) {
        throw UnsupportedSize("StateVector supports at most " + std::to_string(kMaxQubits) +
                              " qubits");
    }
    return StateVector(n, std::move(amps));
}

StateVector StateVector::basis(std::size_t n_qubits, std::size_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) {
        throw InvalidArgument("basis index " + std::to_string(index) + " out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

double StateVector::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

void StateVector::check_qubit(std::size_t qubit) const {
    if (qubit >= n_qubits_) {
        throw InvalidArgument("qubit index " + std::to_string(qubit) + " out of range for " +
                              std::to_string(n_qubits_) + " qubits");
    }
}

void StateVector::apply_matrix(std::size_t qubit, const Matrix2 &m) {
    check_qubit(qubit);
    const std::size_t stride = bit_of(n_qubits_, qubit);
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i + stride];
            amps_[i] = m[0] * a0 + m[1] * a1;
            amps_[i + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

void StateVector::apply_rx(std::size_t qubit, double angle) { apply_matrix(qubit, rx_matrix(angle)); }
void StateVector::apply_ry(std::size_t qubit, double angle) { apply_matrix(qubit, ry_matrix(angle)); }

void StateVector::apply_rz(std::size_t qubit, double angle) {
    check_qubit(qubit);
    const Complex lo = std::exp(-kI * (angle / 2));
    const Complex hi = std::exp(kI * (angle / 2));
    const std::size_t bit = bit_of(n_qubits_, qubit);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] *= (i & bit) ? hi : lo;
    }
}

void StateVector::apply_rot(std::size_t qubit, const RotationAngles &angles) {
    apply_matrix(qubit, rot_matrix(angles));
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw InvalidArgument("CNOT control and target must differ (both " +
                              std::to_string(control) + ")");
    }
    const std::size_t cbit = bit_of(n_qubits_, control);
    const std::size_t tbit = bit_of(n_qubits_, target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(amps_[i], amps_[i | tbit]);
        }
    }
}

void StateVector::apply(const Gate &gate) {
    switch (gate.kind) {
    case GateKind::rx:
        apply_rx(gate.target, gate.angles.phi);
        break;
    case GateKind::ry:
        apply_ry(gate.target, gate.angles.phi);
        break;
    case GateKind::rz:
        apply_rz(gate.target, gate.angles.phi);
        break;
    case GateKind::rot:
        apply_rot(gate.target, gate.angles);
        break;
    case GateKind::cnot:
        apply_cnot(gate.control, gate.target);
        break;
    }
}

void StateVector::apply(std::span<const Gate> circuit) {
    for (const auto &g : circuit) {
        apply(g);
    }
}

double StateVector::expectation_z(std::size_t qubit) const {
    check_qubit(qubit);
    const std::size_t bit = bit_of(n_qubits_, qubit);
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        acc += (i & bit) ? -std::norm(amps_[i]) : std::norm(amps_[i]);
    }
    return acc;
}

double fidelity(const StateVector &a, const StateVector &b) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument("fidelity: dimension mismatch");
    }
    Complex inner{0, 0};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        inner += std::conj(a[i]) * b[i];
    }
    return std::norm(inner);
}

} // namespace vqc

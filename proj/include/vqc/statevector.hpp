/**
 * @file
 * Dense statevector simulator for small circuits made of single-qubit
 * rotations and CNOTs.
 *
 * Qubit 0 is the most-significant bit of the basis index: on 3 qubits the
 * basis state |q0 q1 q2> = |100> lives at index 4.
 */
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vqc {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 12;

/// Angles of the composite rotation R(phi, theta, omega) = RZ(omega) RY(theta) RZ(phi).
struct RotationAngles {
    double phi = 0.0;
    double theta = 0.0;
    double omega = 0.0;
};

enum class GateKind { rx, ry, rz, rot, cnot };

/// One gate of a circuit. `angles.phi` holds the single angle of RX/RY/RZ.
struct Gate {
    GateKind kind = GateKind::rz;
    std::size_t target = 0;
    std::size_t control = 0; // CNOT only
    RotationAngles angles{};

    static Gate rx(std::size_t q, double a) { return {GateKind::rx, q, 0, {a, 0.0, 0.0}}; }
    static Gate ry(std::size_t q, double a) { return {GateKind::ry, q, 0, {a, 0.0, 0.0}}; }
    static Gate rz(std::size_t q, double a) { return {GateKind::rz, q, 0, {a, 0.0, 0.0}}; }
    static Gate rot(std::size_t q, RotationAngles a) { return {GateKind::rot, q, 0, a}; }
    static Gate cnot(std::size_t c, std::size_t t) { return {GateKind::cnot, t, c, {}}; }
};

using Circuit = std::vector<Gate>;

/// 2x2 matrix in row-major order: {m00, m01, m10, m11}.
using Matrix2 = std::array<Complex, 4>;

Matrix2 rx_matrix(double angle);
Matrix2 ry_matrix(double angle);
Matrix2 rz_matrix(double angle);
/// Closed form of RZ(omega) RY(theta) RZ(phi).
Matrix2 rot_matrix(const RotationAngles &angles);

class StateVector {
  public:
    /// |0...0> on n qubits. Throws UnsupportedSize outside 1..kMaxQubits.
    explicit StateVector(std::size_t n_qubits);

    /// Wraps explicit amplitudes; size must be a power of two. The caller is
    /// responsible for normalization.
    static StateVector from_amplitudes(std::vector<Complex> amps);
    static StateVector basis(std::size_t n_qubits, std::size_t index);

    std::size_t n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const noexcept;

    void apply_matrix(std::size_t qubit, const Matrix2 &m);
    void apply_rx(std::size_t qubit, double angle);
    void apply_ry(std::size_t qubit, double angle);
    void apply_rz(std::size_t qubit, double angle);
    void apply_rot(std::size_t qubit, const RotationAngles &angles);
    void apply_cnot(std::size_t control, std::size_t target);

    void apply(const Gate &gate);
    void apply(std::span<const Gate> circuit);

    /// <Z> on `qubit`, in [-1, 1] for a normalized state.
    double expectation_z(std::size_t qubit) const;

  private:
    StateVector(std::size_t n_qubits, std::vector<Complex> amps);
    void check_qubit(std::size_t qubit) const;

    std::size_t n_qubits_;
    std::vector<Complex> amps_;
};

/// |<a|b>|^2, insensitive to global phase.
double fidelity(const StateVector &a, const StateVector &b);

} // namespace vqc

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mogvqe {

using cplx = std::complex<double>;

enum class Axis : std::uint8_t { X, Y, Z };

enum class GateKind : std::uint8_t { RX, RY, RZ, CNOT };

inline Axis axis_of(GateKind k) {
  switch (k) {
    case GateKind::RX: return Axis::X;
    case GateKind::RY: return Axis::Y;
    case GateKind::RZ: return Axis::Z;
    default: throw std::invalid_argument("axis_of: CNOT has no rotation axis");
  }
}

/// One gate of the lowered circuit. `control` is used by CNOT only (-1 otherwise),
/// `angle` by rotations only.
struct Gate {
  GateKind kind;
  int qubit;
  int control = -1;
  double angle = 0.0;

  static Gate rx(int q, double a) { return {GateKind::RX, q, -1, a}; }
  static Gate ry(int q, double a) { return {GateKind::RY, q, -1, a}; }
  static Gate rz(int q, double a) { return {GateKind::RZ, q, -1, a}; }
  static Gate rot(Axis ax, int q, double a) {
    switch (ax) {
      case Axis::X: return rx(q, a);
      case Axis::Y: return ry(q, a);
      default: return rz(q, a);
    }
  }
  static Gate cnot(int c, int t) { return {GateKind::CNOT, t, c, 0.0}; }
};

/// Dense 2^n amplitude vector. Qubit 0 is the least significant bit of the
/// basis-state index.
struct StateVector {
  int n_qubits = 0;
  std::vector<cplx> amp;

  StateVector() = default;
  explicit StateVector(int n) : n_qubits(n), amp(std::size_t{1} << n) {
    if (n < 1 || n > 30) throw std::invalid_argument("StateVector: n_qubits out of range");
  }

  std::size_t dim() const { return amp.size(); }

  double norm2() const {
    double s = 0.0;
    for (const cplx& a : amp) s += std::norm(a);
    return s;
  }
};

/// Product state |bits>, where bits[i] is the value of qubit i.
inline StateVector basis_state(int n_qubits, const std::string& bits) {
  if (static_cast<int>(bits.size()) != n_qubits)
    throw std::invalid_argument("basis_state: bitstring length must equal n_qubits");
  std::size_t index = 0;
  for (int i = 0; i < n_qubits; ++i) {
    if (bits[i] == '1')
      index |= std::size_t{1} << i;
    else if (bits[i] != '0')
      throw std::invalid_argument("basis_state: bitstring must contain only 0/1");
  }
  StateVector psi(n_qubits);
  psi.amp[index] = 1.0;
  return psi;
}

namespace detail {

inline void check_qubit(const StateVector& psi, int q, const char* who) {
  if (q < 0 || q >= psi.n_qubits)
    throw std::out_of_range(std::string(who) + ": qubit index out of range");
}

/// Applies the 2x2 matrix [[m00,m01],[m10,m11]] on `qubit`, iterating amplitude
/// pairs (i, i + 2^qubit) in stride-blocked order.
inline void apply_single_qubit(StateVector& psi, int qubit, cplx m00, cplx m01,
                               cplx m10, cplx m11) {
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t dim = psi.dim();
  cplx* a = psi.amp.data();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t i0 = base + off;
      const std::size_t i1 = i0 + stride;
      const cplx a0 = a[i0];
      const cplx a1 = a[i1];
      a[i0] = m00 * a0 + m01 * a1;
      a[i1] = m10 * a0 + m11 * a1;
    }
  }
}

}  // namespace detail

/// In-place exp(-i*angle/2 * P_axis) on one qubit.
inline void apply_rotation(StateVector& psi, Axis axis, int qubit, double angle) {
  detail::check_qubit(psi, qubit, "apply_rotation");
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (axis) {
    case Axis::X:
      detail::apply_single_qubit(psi, qubit, c, cplx(0, -s), cplx(0, -s), c);
      break;
    case Axis::Y:
      detail::apply_single_qubit(psi, qubit, c, -s, s, c);
      break;
    case Axis::Z: {
      // Diagonal; phase pass without pair mixing.
      const cplx p0(c, -s);
      const cplx p1(c, s);
      const std::size_t mask = std::size_t{1} << qubit;
      for (std::size_t i = 0; i < psi.dim(); ++i) psi.amp[i] *= (i & mask) ? p1 : p0;
      break;
    }
  }
}

/// In-place CNOT: flips the target bit of every amplitude whose control bit is set.
inline void apply_cnot(StateVector& psi, int control, int target) {
  detail::check_qubit(psi, control, "apply_cnot");
  detail::check_qubit(psi, target, "apply_cnot");
  if (control == target) throw std::invalid_argument("apply_cnot: control equals target");
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  cplx* a = psi.amp.data();
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(a[i], a[i | tmask]);
  }
}

inline void apply_gate(StateVector& psi, const Gate& g) {
  if (g.kind == GateKind::CNOT)
    apply_cnot(psi, g.control, g.qubit);
  else
    apply_rotation(psi, axis_of(g.kind), g.qubit, g.angle);
}

/// Applies gates left-to-right (temporal order).
inline void run_circuit(StateVector& psi, std::span<const Gate> gates) {
  for (const Gate& g : gates) apply_gate(psi, g);
}

inline StateVector run_circuit(const StateVector& psi0, std::span<const Gate> gates) {
  StateVector psi = psi0;
  run_circuit(psi, gates);
  return psi;
}

}  // namespace mogvqe

#pragma once

#include <array>
#include <cstdio>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mogvqe/rng.hpp"
#include "mogvqe/sim.hpp"

namespace mogvqe {

enum class BlockKind : std::uint8_t { A, B };

inline int block_angle_count(BlockKind k) { return k == BlockKind::A ? 4 : 5; }
inline int block_cnot_count(BlockKind k) { return k == BlockKind::A ? 1 : 2; }

/// Two-qubit gate block, the GA's atomic gene. Kind A is a CNOT sandwiched
/// between Y rotations (4 angles). Kind B is a basis-dressed controlled-RY
/// built from two CNOTs (5 angles, 9 single-qubit gates); the assignment
/// theta4 = theta5 = 0 makes it the identity for any theta1..theta3.
struct Block {
  BlockKind kind = BlockKind::A;
  int control = 0;
  int target = 1;
  std::vector<double> angles;

  Block() = default;
  Block(BlockKind k, int c, int t)
      : kind(k), control(c), target(t), angles(block_angle_count(k), 0.0) {
    if (c == t) throw std::invalid_argument("Block: control equals target");
  }
};

/// Ordered block list; a GA individual's genome.
struct Circuit {
  int n_qubits = 0;
  std::vector<Block> blocks;

  Circuit() = default;
  explicit Circuit(int n) : n_qubits(n) {}

  int angle_count() const {
    int n = 0;
    for (const Block& b : blocks) n += block_angle_count(b.kind);
    return n;
  }

  std::vector<double> collect_angles() const {
    std::vector<double> out;
    out.reserve(angle_count());
    for (const Block& b : blocks) out.insert(out.end(), b.angles.begin(), b.angles.end());
    return out;
  }

  void set_angles(std::span<const double> angles) {
    if (static_cast<int>(angles.size()) != angle_count())
      throw std::invalid_argument("Circuit::set_angles: angle vector length mismatch");
    std::size_t k = 0;
    for (Block& b : blocks)
      for (double& a : b.angles) a = angles[k++];
  }
};

inline int cnot_count(const Circuit& c) {
  int n = 0;
  for (const Block& b : c.blocks) n += block_cnot_count(b.kind);
  return n;
}

namespace detail {

inline void append_block_gates(BlockKind kind, int c, int t,
                               std::span<const double> a, std::vector<Gate>& out) {
  if (kind == BlockKind::A) {
    out.push_back(Gate::ry(c, a[0]));
    out.push_back(Gate::ry(t, a[1]));
    out.push_back(Gate::cnot(c, t));
    out.push_back(Gate::ry(c, a[2]));
    out.push_back(Gate::ry(t, a[3]));
  } else {
    out.push_back(Gate::ry(c, a[0]));
    out.push_back(Gate::rz(c, a[1]));
    out.push_back(Gate::rz(t, a[2]));
    out.push_back(Gate::ry(t, a[3] / 2.0));
    out.push_back(Gate::cnot(c, t));
    out.push_back(Gate::ry(t, -a[3] / 2.0));
    out.push_back(Gate::cnot(c, t));
    out.push_back(Gate::rz(t, -a[2]));
    out.push_back(Gate::rz(t, a[4]));
    out.push_back(Gate::rz(c, -a[1]));
    out.push_back(Gate::ry(c, -a[0]));
  }
}

}  // namespace detail

inline std::vector<Gate> lower_block(const Block& b) {
  std::vector<Gate> out;
  detail::append_block_gates(b.kind, b.control, b.target, b.angles, out);
  return out;
}

/// Lowers the whole circuit with an external flat angle vector, reusing `out`.
inline void lower_circuit(const Circuit& c, std::span<const double> angles,
                          std::vector<Gate>& out) {
  if (static_cast<int>(angles.size()) != c.angle_count())
    throw std::invalid_argument("lower_circuit: angle vector length mismatch");
  out.clear();
  std::size_t k = 0;
  for (const Block& b : c.blocks) {
    const std::size_t n = block_angle_count(b.kind);
    detail::append_block_gates(b.kind, b.control, b.target, angles.subspan(k, n), out);
    k += n;
  }
}

inline std::vector<Gate> lower_circuit(const Circuit& c) {
  std::vector<Gate> out;
  lower_circuit(c, c.collect_angles(), out);
  return out;
}

// ---------------------------------------------------------------------------
// Initialization and mutation
// ---------------------------------------------------------------------------

constexpr double kInsertWeight = 2.0;
constexpr double kDeleteWeight = 1.0;
constexpr double kBigMutationWeight = 0.25;
constexpr int kBigMutationSteps = 10;

namespace detail {

inline Block random_block(int n_qubits, BlockKind kind, bool identity_init, Rng& rng) {
  std::uniform_int_distribution<int> qubit(0, n_qubits - 1);
  const int c = qubit(rng);
  int t = qubit(rng);
  while (t == c) t = qubit(rng);
  Block b(kind, c, t);
  for (double& a : b.angles) a = random_angle(rng);
  if (kind == BlockKind::B && identity_init) {
    b.angles[3] = 0.0;
    b.angles[4] = 0.0;
  }
  return b;
}

inline void insert_random_block(Circuit& c, BlockKind kind, bool identity_init, Rng& rng) {
  Block b = random_block(c.n_qubits, kind, identity_init, rng);
  std::uniform_int_distribution<std::size_t> pos(0, c.blocks.size());
  c.blocks.insert(c.blocks.begin() + pos(rng), std::move(b));
}

inline void delete_random_block(Circuit& c, Rng& rng) {
  if (c.blocks.empty()) return;
  std::uniform_int_distribution<std::size_t> pos(0, c.blocks.size() - 1);
  c.blocks.erase(c.blocks.begin() + pos(rng));
}

}  // namespace detail

/// Zeroth-population circuit: with probability 1/2 a checkerboard of blocks on
/// even then odd sublattice pairs (N-1 blocks total), otherwise a uniformly
/// random count in [N, 4N] of blocks on random qubit pairs.
inline Circuit init_circuit(int n_qubits, Rng& rng, BlockKind kind = BlockKind::A,
                            bool identity_init = false) {
  if (n_qubits < 2) throw std::invalid_argument("init_circuit: n_qubits must be >= 2");
  Circuit c(n_qubits);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < 0.5) {
    for (int i = 0; i + 1 < n_qubits; i += 2) {
      Block b(kind, i, i + 1);
      for (double& a : b.angles) a = random_angle(rng);
      c.blocks.push_back(std::move(b));
    }
    for (int i = 1; i + 1 < n_qubits; i += 2) {
      Block b(kind, i, i + 1);
      for (double& a : b.angles) a = random_angle(rng);
      c.blocks.push_back(std::move(b));
    }
  } else {
    std::uniform_int_distribution<int> count(n_qubits, 4 * n_qubits);
    const int n_init = count(rng);
    for (int i = 0; i < n_init; ++i)
      detail::insert_random_block(c, kind, identity_init, rng);
  }
  return c;
}

/// Weighted choice of insert (2.0), delete (1.0), or a 10-step large-scale
/// mutation (0.25); insertions and deletions inside the large-scale step keep
/// the 2:1 odds. Returns a new circuit, the input is untouched.
inline Circuit mutate(const Circuit& c, Rng& rng, BlockKind insert_kind = BlockKind::A,
                      bool identity_init = false) {
  Circuit out = c;
  const double total = kInsertWeight + kDeleteWeight + kBigMutationWeight;
  std::uniform_real_distribution<double> u(0.0, total);
  const double pick = u(rng);
  if (pick < kInsertWeight) {
    detail::insert_random_block(out, insert_kind, identity_init, rng);
  } else if (pick < kInsertWeight + kDeleteWeight) {
    detail::delete_random_block(out, rng);
  } else {
    std::uniform_real_distribution<double> step(0.0, kInsertWeight + kDeleteWeight);
    for (int i = 0; i < kBigMutationSteps; ++i) {
      if (step(rng) < kInsertWeight)
        detail::insert_random_block(out, insert_kind, identity_init, rng);
      else
        detail::delete_random_block(out, rng);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hardware-efficient baseline
// ---------------------------------------------------------------------------

struct HeaConfig {
  int n_qubits = 0;
  int depth = 0;  // layers p
};

/// Layered template: zeroth layer RZ-RX-RZ on every qubit, then p repetitions
/// of a neighbour CNOT chain followed by RX-RZ on every qubit.
struct HeaAnsatz {
  HeaConfig cfg;

  explicit HeaAnsatz(HeaConfig config) : cfg(config) {
    if (cfg.n_qubits < 1) throw std::invalid_argument("HeaAnsatz: n_qubits must be >= 1");
    if (cfg.depth < 0) throw std::invalid_argument("HeaAnsatz: depth must be >= 0");
  }

  int param_count() const { return 3 * cfg.n_qubits + 2 * cfg.depth * cfg.n_qubits; }
  int cnot_count() const { return cfg.depth * (cfg.n_qubits - 1); }

  std::vector<Gate> gates(std::span<const double> angles) const {
    if (static_cast<int>(angles.size()) != param_count())
      throw std::invalid_argument("HeaAnsatz::gates: angle vector length mismatch");
    std::vector<Gate> out;
    out.reserve(param_count() + cnot_count());
    std::size_t k = 0;
    for (int q = 0; q < cfg.n_qubits; ++q) {
      out.push_back(Gate::rz(q, angles[k++]));
      out.push_back(Gate::rx(q, angles[k++]));
      out.push_back(Gate::rz(q, angles[k++]));
    }
    for (int layer = 0; layer < cfg.depth; ++layer) {
      for (int q = 0; q + 1 < cfg.n_qubits; ++q) out.push_back(Gate::cnot(q, q + 1));
      for (int q = 0; q < cfg.n_qubits; ++q) {
        out.push_back(Gate::rx(q, angles[k++]));
        out.push_back(Gate::rz(q, angles[k++]));
      }
    }
    return out;
  }
};

inline HeaAnsatz hea_circuit(HeaConfig cfg) { return HeaAnsatz(cfg); }

// ---------------------------------------------------------------------------
// OpenQASM 2.0 export
// ---------------------------------------------------------------------------

inline void export_qasm(const Circuit& c, std::span<const double> angles, std::ostream& out) {
  std::vector<Gate> gates;
  lower_circuit(c, angles, gates);
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.n_qubits << "];\n";
  char buf[64];
  for (const Gate& g : gates) {
    switch (g.kind) {
      case GateKind::CNOT:
        out << "cx q[" << g.control << "],q[" << g.qubit << "];\n";
        break;
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ: {
        const char* name = g.kind == GateKind::RX ? "rx" : g.kind == GateKind::RY ? "ry" : "rz";
        std::snprintf(buf, sizeof buf, "%.17g", g.angle);
        out << name << "(" << buf << ") q[" << g.qubit << "];\n";
        break;
      }
    }
  }
}

inline std::string export_qasm(const Circuit& c, std::span<const double> angles) {
  std::ostringstream ss;
  export_qasm(c, angles, ss);
  return ss.str();
}

inline std::string export_qasm(const Circuit& c) {
  const std::vector<double> angles = c.collect_angles();
  return export_qasm(c, angles);
}

}  // namespace mogvqe

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mogvqe/sim.hpp"

namespace mogvqe {

/// One weighted Pauli string. Qubits absent from `ops` carry the identity.
struct PauliTerm {
  double coefficient = 0.0;
  std::map<int, Axis> ops;  // qubit index -> axis, indices distinct by construction

  bool is_identity() const { return ops.empty(); }
};

/// Weighted sum of Pauli strings plus the Hartree-Fock reference bitstring.
/// Immutable after construction; shareable across evaluation threads.
struct Hamiltonian {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;
  std::string hf_state;  // bitstring, first character = qubit 0
  std::map<std::string, std::string> metadata;
};

namespace detail {

/// Precomputed bitmask form of one term: P|b> = phase(b) * |b ^ flip_mask>,
/// phase(b) = i^{n_y} * (-1)^{popcount(b & phase_mask)}.
struct TermMasks {
  double coefficient;
  std::uint64_t flip_mask;   // X and Y qubits
  std::uint64_t phase_mask;  // Y and Z qubits
  cplx y_phase;              // i^{n_y}
};

inline TermMasks make_masks(const PauliTerm& t) {
  TermMasks m{t.coefficient, 0, 0, cplx(1, 0)};
  int n_y = 0;
  for (const auto& [q, ax] : t.ops) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (ax == Axis::X || ax == Axis::Y) m.flip_mask |= bit;
    if (ax == Axis::Y || ax == Axis::Z) m.phase_mask |= bit;
    if (ax == Axis::Y) ++n_y;
  }
  static const cplx i_pow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  m.y_phase = i_pow[n_y % 4];
  return m;
}

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

}  // namespace detail

/// <psi| sum_t coeff_t P_t |psi>. The result of a real-weighted Pauli sum is
/// real; the imaginary residue is checked against 1e-10.
inline double expectation(const Hamiltonian& h, const StateVector& psi) {
  if (psi.n_qubits != h.n_qubits || psi.dim() != (std::size_t{1} << h.n_qubits))
    throw std::invalid_argument("expectation: state dimension does not match Hamiltonian");
  const std::size_t dim = psi.dim();
  const cplx* a = psi.amp.data();
  cplx total(0, 0);
  for (const PauliTerm& t : h.terms) {
    const detail::TermMasks m = detail::make_masks(t);
    if (m.flip_mask == 0) {
      // Z-string: diagonal, real by construction.
      double s = 0.0;
      for (std::size_t b = 0; b < dim; ++b)
        s += detail::parity_sign(b & m.phase_mask) * std::norm(a[b]);
      total += m.coefficient * s;
    } else {
      cplx s(0, 0);
      for (std::size_t b = 0; b < dim; ++b) {
        const cplx v = detail::parity_sign(b & m.phase_mask) * a[b];
        s += std::conj(a[b ^ m.flip_mask]) * v;
      }
      total += m.coefficient * (m.y_phase * s);
    }
  }
  if (std::abs(total.imag()) >= 1e-10)
    throw std::runtime_error("expectation: imaginary residue exceeds 1e-10");
  return total.real();
}

/// out += H * v, matrix-free via the term masks.
inline void accumulate_apply(const Hamiltonian& h, const std::vector<cplx>& v,
                             std::vector<cplx>& out) {
  const std::size_t dim = v.size();
  for (const PauliTerm& t : h.terms) {
    const detail::TermMasks m = detail::make_masks(t);
    const cplx scale = m.coefficient * m.y_phase;
    for (std::size_t b = 0; b < dim; ++b)
      out[b ^ m.flip_mask] += scale * detail::parity_sign(b & m.phase_mask) * v[b];
  }
}

/// Sum of <Z_i> over all qubits.
inline double magnetization(const StateVector& psi) {
  double s = 0.0;
  for (std::size_t b = 0; b < psi.dim(); ++b) {
    const int ones = std::popcount(b);
    s += (psi.n_qubits - 2 * ones) * std::norm(psi.amp[b]);
  }
  return s;
}

/// <prod_i Z_i>.
inline double parity(const StateVector& psi) {
  double s = 0.0;
  for (std::size_t b = 0; b < psi.dim(); ++b)
    s += detail::parity_sign(b) * std::norm(psi.amp[b]);
  return s;
}

namespace detail {

inline Eigen::MatrixXcd dense_matrix(const Hamiltonian& h) {
  const std::size_t dim = std::size_t{1} << h.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const PauliTerm& t : h.terms) {
    const TermMasks tm = make_masks(t);
    const cplx scale = tm.coefficient * tm.y_phase;
    for (std::size_t b = 0; b < dim; ++b)
      m(b ^ tm.flip_mask, b) += scale * parity_sign(b & tm.phase_mask);
  }
  return m;
}

inline double ground_energy_dense(const Hamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense_matrix(h),
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Lanczos with full reorthogonalization, smallest Ritz value.
inline double ground_energy_lanczos(const Hamiltonian& h, std::uint64_t seed = 0x9e3779b9u) {
  const std::size_t dim = std::size_t{1} << h.n_qubits;
  const int max_iters = static_cast<int>(std::min<std::size_t>(dim, 400));

  // Deterministic pseudo-random start vector.
  std::vector<cplx> q(dim);
  std::uint64_t s = seed;
  double nrm = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    const double re = static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    const double im = static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
    q[i] = cplx(re, im);
    nrm += std::norm(q[i]);
  }
  nrm = std::sqrt(nrm);
  for (auto& x : q) x /= nrm;

  std::vector<std::vector<cplx>> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<cplx> w(dim);

  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_iters; ++k) {
    basis.push_back(q);
    std::fill(w.begin(), w.end(), cplx(0, 0));
    accumulate_apply(h, q, w);

    cplx a(0, 0);
    for (std::size_t i = 0; i < dim; ++i) a += std::conj(q[i]) * w[i];
    alpha.push_back(a.real());

    // Full reorthogonalization keeps the Krylov basis numerically orthonormal.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : basis) {
        cplx proj(0, 0);
        for (std::size_t i = 0; i < dim; ++i) proj += std::conj(v[i]) * w[i];
        for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * v[i];
      }
    }

    double b = 0.0;
    for (const cplx& x : w) b += std::norm(x);
    b = std::sqrt(b);

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri, Eigen::EigenvaluesOnly);
    const double current = solver.eigenvalues().minCoeff();

    if (b < 1e-12) return current;  // invariant subspace exhausted
    if (k > 8 && std::abs(current - previous) < 1e-12 * (1.0 + std::abs(current)))
      return current;
    previous = current;

    beta.push_back(b);
    for (std::size_t i = 0; i < dim; ++i) q[i] = w[i] / b;
  }
  return previous;
}

}  // namespace detail

constexpr int kDefaultDenseLimit = 14;

/// Minimum eigenvalue of the assembled Hermitian matrix. Dense solve for small
/// systems, matrix-free Lanczos above 2^10 dimensions.
inline double exact_ground_energy(const Hamiltonian& h, int dense_limit = kDefaultDenseLimit) {
  if (h.n_qubits > dense_limit)
    throw std::invalid_argument("exact_ground_energy: n_qubits exceeds the dense limit");
  if (h.terms.empty()) return 0.0;
  if (h.n_qubits <= 10) return detail::ground_energy_dense(h);
  return detail::ground_energy_lanczos(h);
}

// ---------------------------------------------------------------------------
// Text format
//
//   qubits: <N>
//   hf: <bitstring of length N>
//   # key=value            (captured as metadata; other comments ignored)
//   <coefficient> <op>*    where <op> is X<i>, Y<i>, Z<i>, or the token I
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void parse_fail(int line_no, const std::string& what) {
  throw std::runtime_error("hamiltonian parse error at line " + std::to_string(line_no) +
                           ": " + what);
}

inline std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace detail

inline Hamiltonian parse_hamiltonian(std::istream& in) {
  Hamiltonian h;
  std::string line;
  int line_no = 0;
  bool have_qubits = false;
  bool have_hf = false;
  std::map<std::string, std::pair<double, std::map<int, Axis>>> merged;  // key -> (coeff, ops)
  std::vector<std::string> order;

  while (std::getline(in, line)) {
    ++line_no;

    // Metadata comments: full lines of the form "# key=value".
    const auto hash = line.find('#');
    if (hash != std::string::npos && detail::blank(line.substr(0, hash))) {
      std::string c = line.substr(hash + 1);
      const auto eq = c.find('=');
      if (eq != std::string::npos) {
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t\r");
          const auto e = s.find_last_not_of(" \t\r");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(c.substr(0, eq));
        const std::string value = trim(c.substr(eq + 1));
        if (!key.empty() && key.find(' ') == std::string::npos) h.metadata[key] = value;
      }
    }

    const std::string body = detail::strip_comment(line);
    if (detail::blank(body)) continue;

    std::istringstream ss(body);
    if (!have_qubits) {
      std::string tag;
      ss >> tag;
      if (tag != "qubits:") detail::parse_fail(line_no, "expected 'qubits: <N>' header");
      if (!(ss >> h.n_qubits) || h.n_qubits < 1 || h.n_qubits > 63)
        detail::parse_fail(line_no, "qubit count must be an integer in [1, 63]");
      have_qubits = true;
      continue;
    }
    if (!have_hf) {
      std::string tag;
      ss >> tag;
      if (tag != "hf:") detail::parse_fail(line_no, "expected 'hf: <bitstring>' header");
      if (!(ss >> h.hf_state)) detail::parse_fail(line_no, "missing hf bitstring");
      if (static_cast<int>(h.hf_state.size()) != h.n_qubits)
        detail::parse_fail(line_no, "hf bitstring length must equal the qubit count");
      if (h.hf_state.find_first_not_of("01") != std::string::npos)
        detail::parse_fail(line_no, "hf bitstring must contain only 0/1");
      have_hf = true;
      continue;
    }

    double coeff;
    if (!(ss >> coeff) || !std::isfinite(coeff))
      detail::parse_fail(line_no, "term line must start with a finite coefficient");
    std::map<int, Axis> ops;
    std::string tok;
    bool identity_token = false;
    while (ss >> tok) {
      if (tok == "I") {
        identity_token = true;
        continue;
      }
      Axis ax;
      switch (tok[0]) {
        case 'X': ax = Axis::X; break;
        case 'Y': ax = Axis::Y; break;
        case 'Z': ax = Axis::Z; break;
        default: detail::parse_fail(line_no, "unknown operator token '" + tok + "'");
      }
      int q;
      try {
        std::size_t used = 0;
        q = std::stoi(tok.substr(1), &used);
        if (used != tok.size() - 1) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        detail::parse_fail(line_no, "malformed operator token '" + tok + "'");
      }
      if (q < 0 || q >= h.n_qubits)
        detail::parse_fail(line_no, "qubit index " + std::to_string(q) + " out of range");
      if (!ops.emplace(q, ax).second)
        detail::parse_fail(line_no, "duplicate qubit index in term");
    }
    if (identity_token && !ops.empty())
      detail::parse_fail(line_no, "'I' cannot be combined with other operators");

    std::string key;
    for (const auto& [q, ax] : ops)
      key += std::string(1, "XYZ"[static_cast<int>(ax)]) + std::to_string(q) + " ";
    auto [it, inserted] = merged.emplace(key, std::make_pair(coeff, ops));
    if (inserted)
      order.push_back(key);
    else
      it->second.first += coeff;
  }

  if (!have_qubits) throw std::runtime_error("hamiltonian parse error: missing 'qubits:' header");
  if (!have_hf) throw std::runtime_error("hamiltonian parse error: missing 'hf:' header");

  for (const std::string& key : order) {
    const auto& [coeff, ops] = merged.at(key);
    if (std::abs(coeff) < 1e-12) continue;  // cancelled after merge
    h.terms.push_back(PauliTerm{coeff, ops});
  }
  return h;
}

inline Hamiltonian parse_hamiltonian(const std::string& text) {
  std::istringstream ss(text);
  return parse_hamiltonian(ss);
}

inline void serialize_hamiltonian(const Hamiltonian& h, std::ostream& out) {
  out << "qubits: " << h.n_qubits << "\n";
  out << "hf: " << h.hf_state << "\n";
  for (const auto& [k, v] : h.metadata) out << "# " << k << "=" << v << "\n";
  char buf[64];
  for (const PauliTerm& t : h.terms) {
    std::snprintf(buf, sizeof buf, "%.17g", t.coefficient);
    out << buf;
    if (t.is_identity()) {
      out << " I";
    } else {
      for (const auto& [q, ax] : t.ops) out << " " << "XYZ"[static_cast<int>(ax)] << q;
    }
    out << "\n";
  }
}

inline std::string serialize_hamiltonian(const Hamiltonian& h) {
  std::ostringstream ss;
  serialize_hamiltonian(h, ss);
  return ss.str();
}

}  // namespace mogvqe

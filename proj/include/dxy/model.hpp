#pragma once

// Model definitions for the driven-dissipative transverse-field XY chain
// (rotating frame, units of J):
//
//   H = -sum_j [ g sz_j + (1+delta)/2 sx_j sx_{j+1} + (1-delta)/2 sy_j sy_{j+1} ]
//   drho/dt = -i[H, rho] + kappa * sum_j (2 sm_j rho sp_j - {sp_j sm_j, rho})
//
// plus the pair-wise Liouvillian generators used by the MPO engine and the
// exact-diagonalization oracle, and the odd-sublattice duality map relating
// steady states at +g and -g.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dxy/linalg.hpp"

namespace dxy {

struct ModelParams {
  double g = 0.0;      // transverse field, (omega_p - omega_c)/2J
  double delta = 0.0;  // anisotropy = pump strength, Omega/J
  double kappa = 0.0;  // decay rate, kappa/J
  int n_sites = 1;

  void validate() const {
    if (!std::isfinite(g) || !std::isfinite(delta))
      throw std::invalid_argument("ModelParams: g, delta must be finite");
    if (!(kappa >= 0.0))
      throw std::invalid_argument("ModelParams: kappa must be >= 0");
    if (n_sites < 1)
      throw std::invalid_argument("ModelParams: n_sites must be >= 1");
  }
};

namespace pauli {

// Basis convention: index 0 = |up> (sz = +1, the excited state), index 1 =
// |down>. The dissipator's dark state is all-down.
inline const Eigen::Matrix2cd& id() {
  static const Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  return m;
}
inline const Eigen::Matrix2cd& x() {
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  return m;
}
inline const Eigen::Matrix2cd& y() {
  static const Eigen::Matrix2cd m =
      (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return m;
}
inline const Eigen::Matrix2cd& z() {
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  return m;
}
inline const Eigen::Matrix2cd& minus() {  // |down><up|
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 0, 1, 0).finished();
  return m;
}
inline const Eigen::Matrix2cd& plus() {  // |up><down|
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 0, 0).finished();
  return m;
}

// {1, sx, sy, sz}; the single-site operator basis used by the MPO.
inline const std::array<Eigen::Matrix2cd, 4>& basis() {
  static const std::array<Eigen::Matrix2cd, 4> b = {id(), x(), y(), z()};
  return b;
}

inline const Eigen::Matrix2cd& by_index(int i) { return basis().at(i); }

}  // namespace pauli

namespace model {

using Matrix16c = Eigen::Matrix<Complex, 16, 16>;
using Matrix16d = Eigen::Matrix<double, 16, 16>;

// How on-site terms (field + dissipator) are distributed over bond
// generators. Either choice reassembles the same full Liouvillian.
enum class SplitConvention {
  SymmetricHalves,  // interior sites: half to each adjacent bond; ends: full
  LeftAnchored,     // site j's terms on bond j-1 (site 0 on bond 0)
};

// Generator of the two-site piece of the Liouvillian, acting on the
// 16-dimensional pair operator space. Basis: column-stacked computational
// basis |ab><cd| of the 4x4 pair matrix, i.e. index = 4*col + row with
// row, col in {0..3} composed as 2*bit(left site) + bit(right site).
struct PairGenerator {
  Matrix16c matrix;
  int bond = 0;
};

namespace detail {

inline Eigen::MatrixXcd site_op(const Eigen::Matrix2cd& op, int site, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int j = 0; j < n; ++j)
    out = linalg::kron(out, j == site ? op : Eigen::Matrix2cd::Identity().eval()).eval();
  return out;
}

// Lindblad dissipator superoperator for collapse operator a (rate 1):
//   rho -> 2 a rho a^dag - a^dag a rho - rho a^dag a
inline Eigen::MatrixXcd dissipator_superop(const Eigen::MatrixXcd& a) {
  const Eigen::Index d = a.rows();
  const Eigen::MatrixXcd n = a.adjoint() * a;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  return 2.0 * linalg::kron(a.conjugate(), a) - linalg::kron(id, n) -
         linalg::kron(n.transpose(), id);
}

inline Eigen::MatrixXcd commutator_superop(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  return Complex(0, -1) * (linalg::kron(id, h) - linalg::kron(h.transpose(), id));
}

}  // namespace detail

// Two-site Hamiltonian of bond `bond`, including this bond's share of the
// on-site field terms.
inline Eigen::Matrix4cd bond_hamiltonian(const ModelParams& p, int bond,
                                         SplitConvention split =
                                             SplitConvention::SymmetricHalves) {
  const Eigen::Matrix2cd& I = pauli::id();
  double w_left, w_right;
  if (split == SplitConvention::SymmetricHalves) {
    w_left = (bond == 0) ? 1.0 : 0.5;
    w_right = (bond + 1 == p.n_sites - 1) ? 1.0 : 0.5;
  } else {
    w_left = (bond == 0) ? 1.0 : 0.0;
    w_right = 1.0;
  }
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  h -= 0.5 * (1.0 + p.delta) * linalg::kron(pauli::x(), pauli::x());
  h -= 0.5 * (1.0 - p.delta) * linalg::kron(pauli::y(), pauli::y());
  h -= p.g * (w_left * linalg::kron(pauli::z(), I) + w_right * linalg::kron(I, pauli::z()));
  return h;
}

// Pair generator M_{j,j+1} such that sum over bonds of the embedded pair
// generators reproduces the full Liouvillian exactly.
inline PairGenerator build_pair_generator(const ModelParams& p, int bond,
                                          SplitConvention split =
                                              SplitConvention::SymmetricHalves) {
  p.validate();
  if (p.n_sites < 2)
    throw std::invalid_argument("build_pair_generator: n_sites < 2");
  if (bond < 0 || bond >= p.n_sites - 1)
    throw std::invalid_argument("build_pair_generator: bond out of range");

  double w_left, w_right;
  if (split == SplitConvention::SymmetricHalves) {
    w_left = (bond == 0) ? 1.0 : 0.5;
    w_right = (bond + 1 == p.n_sites - 1) ? 1.0 : 0.5;
  } else {
    w_left = (bond == 0) ? 1.0 : 0.0;
    w_right = 1.0;
  }

  const Eigen::Matrix2cd& I = pauli::id();
  PairGenerator gen;
  gen.bond = bond;
  gen.matrix = detail::commutator_superop(bond_hamiltonian(p, bond, split));
  gen.matrix += p.kappa * w_left *
                detail::dissipator_superop(linalg::kron(pauli::minus(), I));
  gen.matrix += p.kappa * w_right *
                detail::dissipator_superop(linalg::kron(I, pauli::minus()));
  return gen;
}

// Embed a pair generator into the 4^n-dimensional superoperator space of the
// full chain (identity on spectator sites). Site 0 is the most significant
// factor of the computational index.
inline Eigen::MatrixXcd embed_pair_superop(const Matrix16c& gen, int bond,
                                           int n_sites) {
  if (n_sites < 2 || bond < 0 || bond >= n_sites - 1)
    throw std::invalid_argument("embed_pair_superop: bad bond/n_sites");
  const int dim = 1 << n_sites;
  const int spec_bits = n_sites - 2;
  const int spec_dim = 1 << spec_bits;
  const int low_bits = n_sites - 2 - bond;  // sites right of the pair

  auto insert_pair = [&](int spec, int pair2) -> int {
    const int low = spec & ((1 << low_bits) - 1);
    const int high = spec >> low_bits;
    return (high << (low_bits + 2)) | (pair2 << low_bits) | low;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (int q_out = 0; q_out < 16; ++q_out) {
    const int c_out = q_out / 4, r_out = q_out % 4;
    for (int q_in = 0; q_in < 16; ++q_in) {
      const Complex val = gen(q_out, q_in);
      if (val == 0.0) continue;
      const int c_in = q_in / 4, r_in = q_in % 4;
      for (int cs = 0; cs < spec_dim; ++cs) {
        const Eigen::Index col_out = insert_pair(cs, c_out);
        const Eigen::Index col_in = insert_pair(cs, c_in);
        for (int rs = 0; rs < spec_dim; ++rs) {
          const Eigen::Index row_out = insert_pair(rs, r_out);
          const Eigen::Index row_in = insert_pair(rs, r_in);
          out(col_out * dim + row_out, col_in * dim + row_in) += val;
        }
      }
    }
  }
  return out;
}

// Change of basis between pair-Pauli coefficients and the column-stacked
// computational basis: column 4*i+j of the returned matrix is
// vec(sigma_i (x) sigma_j). P^H P = 4 * Identity.
inline const Matrix16c& pair_pauli_to_vec() {
  static const Matrix16c p = [] {
    Matrix16c m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Eigen::Matrix4cd op = linalg::kron(pauli::by_index(i), pauli::by_index(j));
        m.col(4 * i + j) = Eigen::Map<Eigen::Matrix<Complex, 16, 1>>(op.data());
      }
    return m;
  }();
  return p;
}

// Conjugate a vec-basis superoperator into the pair-Pauli frame. Any
// Hermiticity-preserving map is real there; the imaginary residue is
// returned through `imag_residual` if requested.
inline Matrix16d pauli_frame(const Matrix16c& vec_frame,
                             double* imag_residual = nullptr) {
  const Matrix16c& p = pair_pauli_to_vec();
  const Matrix16c g = (p.adjoint() * vec_frame * p) / 4.0;
  if (imag_residual) *imag_residual = g.imag().cwiseAbs().maxCoeff();
  return g.real();
}

// rho -> R_odd rho^* R_odd with R_odd the product of sz over the odd
// sublattice (sites 1, 3, 5, ... counting from 1; array indices 0, 2, ...).
// Maps the steady state at transverse field g to the one at -g.
inline Eigen::MatrixXcd apply_sublattice_duality(const Eigen::MatrixXcd& rho,
                                                 int n_sites) {
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("apply_sublattice_duality: shape mismatch");
  Eigen::VectorXd sign(dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    int s = 1;
    for (int j = 0; j < n_sites; j += 2)  // 1-indexed odd sublattice
      if ((r >> (n_sites - 1 - j)) & 1) s = -s;
    sign(r) = s;
  }
  return sign.asDiagonal() * rho.conjugate() * sign.asDiagonal();
}

}  // namespace model
}  // namespace dxy

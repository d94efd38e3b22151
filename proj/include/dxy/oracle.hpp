#pragma once

// Exact-diagonalization oracle: dense Liouvillian and steady state for small
// chains. Ground truth for validating the MPO evolution. The Liouvillian is
// assembled directly from the N-site Hamiltonian and dissipators, not from
// the pair generators, so the two constructions cross-check each other.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "dxy/linalg.hpp"
#include "dxy/model.hpp"
#include "dxy/two_site_density.hpp"

namespace dxy {
namespace oracle {

constexpr int kMaxSites = 6;  // 4^7 x 4^7 would not fit in desk-scale memory

struct DenseLiouvillian {
  Eigen::MatrixXcd matrix;  // 4^N x 4^N, column-stacking convention
  ModelParams params;
};

struct DensityVector {
  Eigen::VectorXcd vec;  // 4^N coefficients, column-stacking
  int n_sites = 0;

  Eigen::MatrixXcd as_matrix() const {
    return linalg::unvectorize(vec, Eigen::Index(1) << n_sites);
  }
};

inline Eigen::MatrixXcd full_hamiltonian(const ModelParams& p) {
  const int n = p.n_sites;
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < n; ++j)
    h -= p.g * model::detail::site_op(pauli::z(), j, n);
  for (int b = 0; b + 1 < n; ++b) {
    h -= 0.5 * (1.0 + p.delta) * model::detail::site_op(pauli::x(), b, n) *
         model::detail::site_op(pauli::x(), b + 1, n);
    h -= 0.5 * (1.0 - p.delta) * model::detail::site_op(pauli::y(), b, n) *
         model::detail::site_op(pauli::y(), b + 1, n);
  }
  return h;
}

inline DenseLiouvillian build_liouvillian(const ModelParams& p) {
  p.validate();
  if (p.n_sites > kMaxSites)
    throw std::invalid_argument("build_liouvillian: n_sites > 6");
  const int n = p.n_sites;
  const Eigen::Index dim = Eigen::Index(1) << n;

  DenseLiouvillian liou;
  liou.params = p;
  liou.matrix = model::detail::commutator_superop(full_hamiltonian(p));
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXcd sm = model::detail::site_op(pauli::minus(), j, n);
    liou.matrix += p.kappa * model::detail::dissipator_superop(sm);
  }
  (void)dim;
  return liou;
}

// Unique null vector of L, reshaped to a density matrix, Hermitized and
// trace-normalized. Throws if the nullspace is degenerate within the
// singular-value gap, or if the result is grossly unphysical.
inline DensityVector steady_state(const DenseLiouvillian& liou) {
  const Eigen::Index d2 = liou.matrix.rows();
  const Eigen::Index dim = Eigen::Index(std::llround(std::sqrt(double(d2))));

  auto svd = linalg::svd(liou.matrix);
  const Eigen::Index last = svd.s.size() - 1;
  const double scale = svd.s(0);
  if (last >= 1 && svd.s(last - 1) < 1e-8 * std::max(1.0, scale))
    throw std::runtime_error(
        "steady_state: degenerate nullspace (second singular value " +
        std::to_string(svd.s(last - 1)) + ")");

  Eigen::VectorXcd v = svd.v.col(last);
  Eigen::MatrixXcd rho = linalg::unvectorize(v, dim);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-10)
    throw std::runtime_error("steady_state: null vector has vanishing trace");
  rho *= std::conj(tr) / std::abs(tr);  // fix the arbitrary SVD phase
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::runtime_error("steady_state: steady state not PSD");

  DensityVector out;
  out.n_sites = liou.params.n_sites;
  out.vec = linalg::vectorize(rho);
  return out;
}

// Exact partial trace onto sites (i, j), i < j.
inline TwoSiteDensity reduce(const DensityVector& rho, int i, int j) {
  const int n = rho.n_sites;
  if (!(0 <= i && i < j && j < n))
    throw std::invalid_argument("reduce: need 0 <= i < j < n_sites");
  const Eigen::Index dim = Eigen::Index(1) << n;
  const Eigen::MatrixXcd full = linalg::unvectorize(rho.vec, dim);

  auto bit = [&](Eigen::Index idx, int site) -> int {
    return int((idx >> (n - 1 - site)) & 1);
  };

  TwoSiteDensity out;
  out.site_i = i;
  out.site_j = j;
  out.rho.setZero();
  for (Eigen::Index r = 0; r < dim; ++r) {
    const int a1 = bit(r, i), b1 = bit(r, j);
    for (Eigen::Index c = 0; c < dim; ++c) {
      // spectator bits must match for the trace
      const Eigen::Index mask_i = Eigen::Index(1) << (n - 1 - i);
      const Eigen::Index mask_j = Eigen::Index(1) << (n - 1 - j);
      const Eigen::Index spec_mask = ~(mask_i | mask_j);
      if ((r & spec_mask) != (c & spec_mask)) continue;
      const int a2 = bit(c, i), b2 = bit(c, j);
      out.rho(2 * a1 + b1, 2 * a2 + b2) += full(r, c);
    }
  }
  return out;
}

}  // namespace oracle
}  // namespace dxy

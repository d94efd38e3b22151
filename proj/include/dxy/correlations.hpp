#pragma once

// Quantum-correlation measures on two-site densities (negativity, geometric
// discord, X-state criteria) and spatial correlation analysis on chain
// states (integrated susceptibility, correlation-length fits).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dxy/linalg.hpp"
#include "dxy/model.hpp"
#include "dxy/mpo.hpp"
#include "dxy/two_site_density.hpp"

namespace dxy {
namespace corr {

// Partial transpose on the second qubit.
inline Eigen::Matrix4cd partial_transpose(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          out(2 * a + d, 2 * c + b) = rho(2 * a + b, 2 * c + d);
  return out;
}

// N = max(0, sum_i |lambda_i| - 1) over the partial-transpose spectrum;
// nonzero iff the pair is inseparable.
inline double negativity(const TwoSiteDensity& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(partial_transpose(rho.rho),
                                                     Eigen::EigenvaluesOnly);
  const double abs_sum = es.eigenvalues().cwiseAbs().sum();
  return std::max(0.0, abs_sum - 1.0);
}

struct DiscordDecomposition {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();  // Bloch vector, first site
  Eigen::Vector3d y = Eigen::Vector3d::Zero();  // Bloch vector, second site
  Eigen::Matrix3d t = Eigen::Matrix3d::Zero();  // correlation matrix
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();  // (x x^T + t t^T)/4
};

inline DiscordDecomposition discord_decompose(const TwoSiteDensity& rho) {
  DiscordDecomposition d;
  for (int i = 1; i < 4; ++i) {
    d.x(i - 1) = (rho.rho * linalg::kron(pauli::by_index(i), pauli::id()))
                     .trace().real();
    d.y(i - 1) = (rho.rho * linalg::kron(pauli::id(), pauli::by_index(i)))
                     .trace().real();
    for (int j = 1; j < 4; ++j)
      d.t(i - 1, j - 1) =
          (rho.rho * linalg::kron(pauli::by_index(i), pauli::by_index(j)))
              .trace().real();
  }
  d.s = 0.25 * (d.x * d.x.transpose() + d.t * d.t.transpose());
  return d;
}

// Closed form for two qubits: D = 2 Tr S - 2 lambda_max(S).
inline double geometric_discord(const TwoSiteDensity& rho) {
  const DiscordDecomposition d = discord_decompose(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(d.s, Eigen::EigenvaluesOnly);
  const double v = 2.0 * d.s.trace() - 2.0 * es.eigenvalues().maxCoeff();
  return std::max(0.0, v);
}

// X-state pattern in the |uu>,|ud>,|du>,|dd> basis:
//   diag(p11, p10, p01, p00), anti-diagonal coherences x4 = <uu|rho|dd>,
//   x5 = <ud|rho|du>. Entangled iff p10 p01 < |x4|^2 or p00 p11 < |x5|^2.
struct XStateDecomposition {
  double p11 = 0, p10 = 0, p01 = 0, p00 = 0;
  Complex x4{}, x5{};
  double residual = 0;  // max |off-pattern element|
  bool x_form = true;   // residual <= 1e-6; criteria advisory otherwise

  bool criterion1() const { return p10 * p01 < std::norm(x4); }
  bool criterion2() const { return p00 * p11 < std::norm(x5); }
  bool entangled() const { return criterion1() || criterion2(); }
};

inline XStateDecomposition x_state_decompose(const TwoSiteDensity& rho) {
  const Eigen::Matrix4cd& m = rho.rho;
  XStateDecomposition d;
  d.p11 = m(0, 0).real();
  d.p10 = m(1, 1).real();
  d.p01 = m(2, 2).real();
  d.p00 = m(3, 3).real();
  d.x4 = m(0, 3);
  d.x5 = m(1, 2);
  double r = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const bool on_pattern = (i == j) || (i + j == 3);
      if (!on_pattern) r = std::max(r, std::abs(m(i, j)));
    }
  d.residual = r;
  d.x_form = r <= 1e-6;
  return d;
}

inline double pair_correlator(const TwoSiteDensity& rho, int axis_a, int axis_b) {
  if (axis_a < 1 || axis_a > 3 || axis_b < 1 || axis_b > 3)
    throw std::invalid_argument("pair_correlator: axis must be 1..3");
  const Complex v =
      (rho.rho * linalg::kron(pauli::by_index(axis_a), pauli::by_index(axis_b)))
          .trace();
  if (std::abs(v.imag()) > 1e-8)
    throw std::runtime_error("pair_correlator: imaginary residue");
  return v.real();
}

// <sm_i sm_j>, assembled from the four in-plane Pauli correlators.
inline Complex sigma_minus_pair(const mpo::State& st, int i, int j) {
  const double xx = mpo::measure(st, mpo::Observable::pair(1, i, 1, j));
  const double yy = mpo::measure(st, mpo::Observable::pair(2, i, 2, j));
  const double xy = mpo::measure(st, mpo::Observable::pair(1, i, 2, j));
  const double yx = mpo::measure(st, mpo::Observable::pair(2, i, 1, j));
  return 0.25 * Complex(xx - yy, -(xy + yx));
}

// S_int = sum_j <sx_i sx_j>, including the j = i self term (= 1).
inline double integrated_susceptibility(const mpo::State& st, int i) {
  if (i < 0 || i >= st.n_sites)
    throw std::invalid_argument("integrated_susceptibility: site out of range");
  double s = 1.0;
  for (int j = 0; j < st.n_sites; ++j) {
    if (j == i) continue;
    s += mpo::measure(st, j < i ? mpo::Observable::pair(1, j, 1, i)
                                : mpo::Observable::pair(1, i, 1, j));
  }
  return s;
}

struct CorrelationLengthFit {
  double xi_c = 0;        // infinity when the series does not decay
  double prefactor = 0;   // exp(intercept) of the log-linear fit
  double fit_residual = 0;  // rms residual in log space
};

// Least-squares fit of log|magnitude| vs separation; xi_c = -1/slope.
// Points at or below the noise floor are dropped.
inline CorrelationLengthFit fit_correlation_length(
    const std::vector<std::pair<double, double>>& series,
    double noise_floor = 1e-10) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [l, mag] : series)
    if (mag > noise_floor) pts.emplace_back(l, std::log(mag));
  if (pts.size() < 3)
    throw std::invalid_argument(
        "fit_correlation_length: need >= 3 points above the noise floor");

  double sl = 0, sy = 0, sll = 0, sly = 0;
  for (const auto& [l, y] : pts) {
    sl += l;
    sy += y;
    sll += l * l;
    sly += l * y;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sly - sl * sy) / (n * sll - sl * sl);
  const double intercept = (sy - slope * sl) / n;

  CorrelationLengthFit fit;
  fit.prefactor = std::exp(intercept);
  fit.xi_c = (std::abs(slope) < 1e-12)
                 ? std::numeric_limits<double>::infinity()
                 : -1.0 / slope;
  double ss = 0;
  for (const auto& [l, y] : pts) {
    const double r = y - (slope * l + intercept);
    ss += r * r;
  }
  fit.fit_residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace corr
}  // namespace dxy

#pragma once

// Bosonic spin-wave theory of the weak-pumping limit: mode dispersions,
// Langevin steady-state moments, real-space correlators (by quadrature over
// the Brillouin zone and independently by residues of the contour integral),
// Gaussian covariance blocks and negativity, and the correlation length.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dxy/model.hpp"

namespace dxy {
namespace spinwave {

struct Dispersions {
  double eps = 0;   // 2 (g + cos k)
  double eta = 0;   // 2 delta cos k
  Complex xi{};     // sqrt(eps^2 - eta^2), principal branch
  double xi2 = 0;   // eps^2 - eta^2 (real)
};

inline Dispersions dispersions(const ModelParams& p, double k) {
  Dispersions d;
  const double c = std::cos(k);
  d.eps = 2.0 * (p.g + c);
  d.eta = 2.0 * p.delta * c;
  d.xi2 = d.eps * d.eps - d.eta * d.eta;
  d.xi = std::sqrt(Complex(d.xi2, 0.0));
  return d;
}

// A k-mode pair (b_k, b^dag_-k) relaxes at rate kappa -+ Im xi_k; all modes
// are stable iff kappa exceeds the largest sqrt(eta^2 - eps^2).
inline double max_mode_growth(const ModelParams& p) {
  auto f = [&](double c) {
    const double eps = 2.0 * (p.g + c), eta = 2.0 * p.delta * c;
    return std::sqrt(std::max(0.0, eta * eta - eps * eps)) - p.kappa;
  };
  double best = std::max(f(1.0), f(-1.0));
  const double one_m_d2 = 1.0 - p.delta * p.delta;
  if (one_m_d2 > 0.0) {
    const double c_int = -p.g / one_m_d2;
    if (c_int >= -1.0 && c_int <= 1.0) best = std::max(best, f(c_int));
  }
  return best;
}

inline bool all_modes_stable(const ModelParams& p) {
  return max_mode_growth(p) < 0.0;
}

struct ModeMoments {
  double n = 0;   // <b_k^dag b_k>
  Complex a{};    // <b_k b_-k>
};

// Steady-state second moments of the (b_k, b^dag_-k) pair from the Lyapunov
// equation M C + C M^dag + D = 0 with vacuum input noise, D = diag(2k, 0).
inline ModeMoments mode_moments(const ModelParams& p, double k) {
  const Dispersions d = dispersions(p, k);
  const Complex i(0, 1);
  Eigen::Matrix2cd m;
  m << -p.kappa + i * d.eps, i * d.eta, -i * d.eta, -p.kappa - i * d.eps;
  // drift eigenvalues are -kappa +- i xi_k
  const double max_re = -p.kappa + std::sqrt(std::max(0.0, -d.xi2));
  if (max_re >= 0.0)
    throw std::runtime_error("mode_moments: unstable mode at k=" +
                             std::to_string(k) + " (Re eigenvalue " +
                             std::to_string(max_re) + ")");

  Eigen::Matrix2cd dmat = Eigen::Matrix2cd::Zero();
  dmat(0, 0) = 2.0 * p.kappa;
  Eigen::Matrix4cd lyap = Eigen::Matrix4cd::Zero();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  lyap += linalg::kron(id, m);             // vec(M C)
  lyap += linalg::kron(m.conjugate(), id); // vec(C M^dag)
  Eigen::Vector4cd rhs;
  rhs << -dmat(0, 0), -dmat(1, 0), -dmat(0, 1), -dmat(1, 1);
  const Eigen::Vector4cd cvec = lyap.fullPivLu().solve(rhs);
  ModeMoments mm;
  mm.n = cvec(0).real() - 1.0;  // C(0,0) = <b b^dag> = n + 1
  mm.a = cvec(2);               // C(0,1) = <b_k b_-k>
  return mm;
}

// Time-domain cross-check: the same moments from the Langevin propagators
//   G1(t) = e^{-kt} [cos(xi t) + i eps sin(xi t)/xi],
//   G2(t) = i eta e^{-kt} sin(xi t)/xi,
// via n = 2k int |G2|^2 dt and a = 2k int G1 G2 dt, in closed form.
inline ModeMoments mode_moments_via_propagators(const ModelParams& p, double k) {
  const Dispersions d = dispersions(p, k);
  if (max_mode_growth(p) >= 0.0)
    throw std::runtime_error("mode_moments_via_propagators: unstable mode");
  const Complex i(0, 1);
  const double aexp = 2.0 * p.kappa;
  auto int_cos = [&](Complex b) { return aexp / (aexp * aexp + b * b); };
  auto int_sin = [&](Complex b) { return b / (aexp * aexp + b * b); };
  const Complex xi = d.xi;
  ModeMoments mm;
  if (std::abs(xi) < 1e-12) {
    // xi -> 0: sin(xi t)/xi -> t; int e^{-at} t^2 = 2/a^3, int e^{-at} t = 1/a^2
    mm.n = 2.0 * p.kappa * d.eta * d.eta * 2.0 / std::pow(aexp, 3);
    const Complex g1g2 = i * d.eta *
                         (1.0 / (aexp * aexp) + i * d.eps * 2.0 / std::pow(aexp, 3));
    mm.a = 2.0 * p.kappa * g1g2;
    return mm;
  }
  // |G2|^2: sin(xi t) sin(xi* t) = [cos((xi - xi*) t) - cos((xi + xi*) t)]/2
  const Complex xis = std::conj(xi);
  const Complex n_int =
      (int_cos(xi - xis) - int_cos(xi + xis)) / (2.0 * xi * xis);
  mm.n = (2.0 * p.kappa * d.eta * d.eta * n_int).real();
  // G1 G2: cos sin = sin(2 xi t)/2; sin^2 = (1 - cos(2 xi t))/2
  const Complex t1 = int_sin(2.0 * xi) / (2.0 * xi);
  const Complex t2 = (1.0 / aexp - int_cos(2.0 * xi)) / (2.0 * xi * xi);
  mm.a = 2.0 * p.kappa * (i * d.eta) * (t1 + i * d.eps * t2);
  return mm;
}

// Poles of the correlator integrand in z = e^{ik}. With
//   zeta_{+-} = [g +- sqrt(g^2 delta^2 - kappa^2 (1 - delta^2)/4)]/(1 - delta^2)
// the four poles solve z^2 + 2 zeta z + 1 = 0 for either zeta branch; the
// set is closed under conjugation and pairs into one root inside and one
// outside the unit circle per branch.
struct PoleSet {
  std::array<Complex, 2> zeta;
  std::array<Complex, 4> z;          // all four poles
  std::array<Complex, 2> inside;     // |z| < 1
  Complex z0{};                      // dominant inside pole (largest |z|, Im >= 0 on ties)
  bool marginal = false;             // |z0| within 1e-12 of the unit circle
};

inline PoleSet poles(const ModelParams& p) {
  if (std::abs(std::abs(p.delta) - 1.0) < 1e-12)
    throw std::invalid_argument("poles: delta = 1 not covered by the closed form");
  if (!(p.kappa > 0.0))
    throw std::invalid_argument("poles: kappa must be > 0");
  const double one_m_d2 = 1.0 - p.delta * p.delta;
  const Complex inner = std::sqrt(
      Complex(p.g * p.g * p.delta * p.delta -
                  p.kappa * p.kappa * one_m_d2 / 4.0,
              0.0));
  PoleSet ps;
  ps.zeta = {(p.g + inner) / one_m_d2, (p.g - inner) / one_m_d2};
  int n_in = 0;
  for (int b = 0; b < 2; ++b) {
    const Complex zeta = ps.zeta[b];
    const Complex root = std::sqrt(zeta * zeta - 1.0);
    ps.z[2 * b] = -zeta + root;
    ps.z[2 * b + 1] = -zeta - root;
  }
  for (const Complex& zz : ps.z)
    if (std::abs(zz) < 1.0) {
      if (n_in < 2) ps.inside[n_in] = zz;
      ++n_in;
    }
  if (n_in != 2)
    throw std::runtime_error(
        "poles: expected exactly two poles inside the unit circle, found " +
        std::to_string(n_in) + " (unstable or marginal parameters)");
  // conjugation closure of the inside pair
  const Complex za = ps.inside[0], zb = ps.inside[1];
  const bool conj_pair = std::abs(za - std::conj(zb)) < 1e-9 * (1.0 + std::abs(za));
  const bool both_real = std::abs(za.imag()) < 1e-12 && std::abs(zb.imag()) < 1e-12;
  if (!conj_pair && !both_real)
    throw std::runtime_error("poles: inside poles not closed under conjugation");
  if (std::abs(za) > std::abs(zb) + 1e-15)
    ps.z0 = za;
  else if (std::abs(zb) > std::abs(za) + 1e-15)
    ps.z0 = zb;
  else
    ps.z0 = (za.imag() >= 0.0) ? za : zb;
  ps.marginal = std::abs(ps.z0) >= 1.0 - 1e-12;
  return ps;
}

struct SpinWaveCorrelators {
  int l_max = 0;
  std::vector<Complex> normal;             // <b_j^dag b_{j+l}>, quadrature
  std::vector<Complex> anomalous;          // <b_j b_{j+l}>, quadrature
  std::vector<Complex> normal_residue;     // same, residue evaluation
  std::vector<Complex> anomalous_residue;
  double discrepancy = 0;                  // max |quadrature - residue|
  Complex alpha{}, beta{};                 // asymptotic prefactors (numeric)
  Complex z0{};
};

namespace detail {

inline Complex quartic_q(const ModelParams& p, Complex z) {
  const Complex a = z * z + 2.0 * p.g * z + 1.0;
  const Complex b = z * z + 1.0;
  return a * a - p.delta * p.delta * b * b + p.kappa * p.kappa * z * z;
}

inline Complex quartic_q_prime(const ModelParams& p, Complex z) {
  const Complex a = z * z + 2.0 * p.g * z + 1.0;
  const Complex b = z * z + 1.0;
  return 2.0 * a * (2.0 * z + 2.0 * p.g) - 2.0 * p.delta * p.delta * b * (2.0 * z) +
         2.0 * p.kappa * p.kappa * z;
}

}  // namespace detail

// Correlators for l = 0..l_max by two independent routes: adaptive periodic
// quadrature of the k-integral over the Lyapunov mode moments, and residue
// evaluation at the inside poles. Throws if any mode is unstable; a
// quadrature/residue discrepancy beyond 1e-8 is reported in the result.
inline SpinWaveCorrelators real_space_correlators(const ModelParams& p, int l_max) {
  if (l_max < 0) throw std::invalid_argument("real_space_correlators: l_max < 0");
  if (max_mode_growth(p) >= 0.0)
    throw std::runtime_error("real_space_correlators: unstable mode spectrum");

  SpinWaveCorrelators out;
  out.l_max = l_max;
  out.normal.assign(l_max + 1, Complex(0, 0));
  out.anomalous.assign(l_max + 1, Complex(0, 0));

  // periodic trapezoid with doubling; exponentially convergent for the
  // smooth integrand, refined until the worst l stabilizes to 1e-12
  std::vector<Complex> prev_n, prev_a;
  for (int m = 256; m <= (1 << 20); m *= 2) {
    std::vector<Complex> cur_n(l_max + 1, Complex(0, 0));
    std::vector<Complex> cur_a(l_max + 1, Complex(0, 0));
    for (int i = 0; i < m; ++i) {
      const double k = -M_PI + 2.0 * M_PI * (double(i) + 0.5) / double(m);
      const ModeMoments mm = mode_moments(p, k);
      for (int l = 0; l <= l_max; ++l) {
        const Complex ph = std::polar(1.0, k * l);
        cur_n[l] += mm.n * ph;
        cur_a[l] += mm.a * ph;
      }
    }
    for (auto& v : cur_n) v /= double(m);
    for (auto& v : cur_a) v /= double(m);
    if (!prev_n.empty()) {
      double worst = 0;
      for (int l = 0; l <= l_max; ++l)
        worst = std::max({worst, std::abs(cur_n[l] - prev_n[l]),
                          std::abs(cur_a[l] - prev_a[l])});
      if (worst < 1e-12) {
        out.normal = std::move(cur_n);
        out.anomalous = std::move(cur_a);
        break;
      }
    }
    prev_n = out.normal = std::move(cur_n);
    prev_a = out.anomalous = std::move(cur_a);
  }

  // residue route
  out.normal_residue.assign(l_max + 1, Complex(0, 0));
  out.anomalous_residue.assign(l_max + 1, Complex(0, 0));
  const PoleSet ps = poles(p);
  out.z0 = ps.z0;
  std::array<Complex, 2> res_n, res_a;
  for (int q = 0; q < 2; ++q) {
    const Complex z = ps.inside[q];
    const Complex qp = detail::quartic_q_prime(p, z);
    const Complex b = z * z + 1.0;
    const Complex a = z * z + 2.0 * p.g * z + 1.0;
    res_n[q] = p.delta * p.delta * b * b / (2.0 * qp);
    res_a[q] = p.delta * b * (-a + Complex(0, p.kappa) * z) / (2.0 * qp);
  }
  for (int l = 0; l <= l_max; ++l) {
    Complex sn(0, 0), sa(0, 0);
    for (int q = 0; q < 2; ++q) {
      const Complex zpow = std::pow(ps.inside[q], l - 1);
      sn += res_n[q] * zpow;
      sa += res_a[q] * zpow;
    }
    if (l == 0) {  // extra simple pole at z = 0
      sn += p.delta * p.delta / (2.0 * (1.0 - p.delta * p.delta));
      sa += -p.delta / (2.0 * (1.0 - p.delta * p.delta));
    }
    out.normal_residue[l] = sn;
    out.anomalous_residue[l] = sa;
  }

  for (int l = 0; l <= l_max; ++l)
    out.discrepancy = std::max(
        {out.discrepancy, std::abs(out.normal[l] - out.normal_residue[l]),
         std::abs(out.anomalous[l] - out.anomalous_residue[l])});

  // asymptotic prefactors, extracted from the dominant-pole residues
  const int dom = (std::abs(ps.inside[0]) >= std::abs(ps.inside[1])) ? 0 : 1;
  if (p.delta != 0.0) {
    out.alpha = res_n[dom] / (p.delta * p.delta);
    out.beta = (std::abs(res_a[0]) >= std::abs(res_a[1]) ? res_a[0] : res_a[1]) /
               p.delta;
  }
  return out;
}

// 4x4 quadrature covariance of the pair (j, j+l), x = b + b^dag,
// p = (b - b^dag)/i, symmetrized ordering. Vacuum gives the identity.
struct CovarianceBlock {
  Eigen::Matrix4d v;
  Eigen::Matrix2d a1, a2, c;
  int separation = 0;
};

inline CovarianceBlock covariance_block(const SpinWaveCorrelators& sw, int l) {
  if (l < 1) throw std::invalid_argument("covariance_block: l >= 1 required");
  if (l > sw.l_max)
    throw std::invalid_argument("covariance_block: l beyond computed l_max");
  const double n0 = sw.normal[0].real();
  const Complex a0 = sw.anomalous[0];
  const double nl = sw.normal[l].real();
  const Complex al = sw.anomalous[l];

  CovarianceBlock cb;
  cb.separation = l;
  cb.a1 << 1.0 + 2.0 * n0 + 2.0 * a0.real(), 2.0 * a0.imag(),
      2.0 * a0.imag(), 1.0 + 2.0 * n0 - 2.0 * a0.real();
  cb.a2 = cb.a1;
  cb.c << 2.0 * nl + 2.0 * al.real(), 2.0 * al.imag(),
      2.0 * al.imag(), 2.0 * nl - 2.0 * al.real();
  cb.v.topLeftCorner<2, 2>() = cb.a1;
  cb.v.topRightCorner<2, 2>() = cb.c;
  cb.v.bottomLeftCorner<2, 2>() = cb.c.transpose();
  cb.v.bottomRightCorner<2, 2>() = cb.a2;

  // physicality: symplectic eigenvalues of V must be >= 1
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = 1; omega(1, 0) = -1; omega(2, 3) = 1; omega(3, 2) = -1;
  Eigen::EigenSolver<Eigen::Matrix4d> es(omega * cb.v, false);
  const double min_symp = es.eigenvalues().cwiseAbs().minCoeff();
  if (min_symp < 1.0 - 1e-8)
    throw std::runtime_error("covariance_block: unphysical covariance (nu = " +
                             std::to_string(min_symp) + ")");
  return cb;
}

// Gaussian negativity from the smallest symplectic eigenvalue of the
// partially transposed covariance: nu_-^2 = (tau - sqrt(tau^2 - 4 det V))/2
// with tau = det A1 + det A2 - 2 det C; N = max(0, 1 - nu_-).
inline double gaussian_negativity(const CovarianceBlock& cb) {
  const double tau =
      cb.a1.determinant() + cb.a2.determinant() - 2.0 * cb.c.determinant();
  const double disc = tau * tau - 4.0 * cb.v.determinant();
  if (disc < -1e-10)
    throw std::runtime_error("gaussian_negativity: negative discriminant");
  const double nu2 = 0.5 * (tau - std::sqrt(std::max(0.0, disc)));
  const double nu = std::sqrt(std::max(0.0, nu2));
  return std::max(0.0, 1.0 - nu);
}

// xi_c = -1/ln|Z0|; infinite when the dominant pole touches the unit circle.
inline double correlation_length(const ModelParams& p) {
  const PoleSet ps = poles(p);
  if (ps.marginal) return std::numeric_limits<double>::infinity();
  return -1.0 / std::log(std::abs(ps.z0));
}

}  // namespace spinwave
}  // namespace dxy

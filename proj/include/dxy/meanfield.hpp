#pragma once

// Mean-field (product-state) theory: non-linear Bloch equations, linear
// stability of the trivial all-down state, closed-form Ising-limit phase
// boundary, and the uniform/staggered ansatz fixed points.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "dxy/model.hpp"

namespace dxy {
namespace meanfield {

struct BlochState {
  std::vector<Eigen::Vector3d> spins;  // (<sx>, <sy>, <sz>) per site

  static BlochState trivial(int n) {
    BlochState s;
    s.spins.assign(n, Eigen::Vector3d(0, 0, -1));
    return s;
  }
};

enum class Boundary {
  Chain,  // open: missing neighbors contribute zero
  Ring,   // periodic; a 2-site ring is the two-sublattice reduction
};

inline BlochState bloch_derivative(const BlochState& s, const ModelParams& p,
                                   Boundary bc = Boundary::Chain) {
  const int n = static_cast<int>(s.spins.size());
  BlochState d;
  d.spins.resize(n);
  for (int j = 0; j < n; ++j) {
    Eigen::Vector3d nb = Eigen::Vector3d::Zero();
    if (bc == Boundary::Ring && n > 1) {
      nb = s.spins[(j + 1) % n] + s.spins[(j + n - 1) % n];
    } else {
      if (j > 0) nb += s.spins[j - 1];
      if (j + 1 < n) nb += s.spins[j + 1];
    }
    const double sx = s.spins[j](0), sy = s.spins[j](1), sz = s.spins[j](2);
    d.spins[j](0) = -p.kappa * sx + 2.0 * p.g * sy - (1.0 - p.delta) * sz * nb(1);
    d.spins[j](1) = -p.kappa * sy - 2.0 * p.g * sx + (1.0 + p.delta) * sz * nb(0);
    d.spins[j](2) = -2.0 * p.kappa * (sz + 1.0) - (1.0 + p.delta) * sy * nb(0) +
                    (1.0 - p.delta) * sx * nb(1);
  }
  return d;
}

struct BlochEvolution {
  BlochState state;
  bool converged = false;
  double t = 0.0;
  double final_residual = 0.0;  // max per-site derivative norm at the end
};

// Classical RK4 until the maximum per-site derivative norm drops below tol.
inline BlochEvolution evolve_bloch(BlochState s, const ModelParams& p, double dt,
                                   double t_max, double tol,
                                   Boundary bc = Boundary::Chain) {
  if (!(dt > 0)) throw std::invalid_argument("evolve_bloch: dt <= 0");
  const int n = static_cast<int>(s.spins.size());
  auto axpy = [&](const BlochState& a, double c, const BlochState& b) {
    BlochState r = a;
    for (int j = 0; j < n; ++j) r.spins[j] += c * b.spins[j];
    return r;
  };
  auto residual = [&](const BlochState& st) {
    const BlochState d = bloch_derivative(st, p, bc);
    double m = 0;
    for (const auto& v : d.spins) m = std::max(m, v.norm());
    return m;
  };

  BlochEvolution out;
  out.final_residual = residual(s);
  double t = 0;
  while (t < t_max) {
    const BlochState k1 = bloch_derivative(s, p, bc);
    const BlochState k2 = bloch_derivative(axpy(s, 0.5 * dt, k1), p, bc);
    const BlochState k3 = bloch_derivative(axpy(s, 0.5 * dt, k2), p, bc);
    const BlochState k4 = bloch_derivative(axpy(s, dt, k3), p, bc);
    for (int j = 0; j < n; ++j)
      s.spins[j] += (dt / 6.0) * (k1.spins[j] + 2.0 * k2.spins[j] +
                                  2.0 * k3.spins[j] + k4.spins[j]);
    t += dt;
    out.final_residual = residual(s);
    if (out.final_residual < tol) {
      out.converged = true;
      break;
    }
  }
  out.state = std::move(s);
  out.t = t;
  return out;
}

// Fluctuation frequencies around the trivial state:
//   nu_k = -i kappa +/- 2 sqrt(g^2 + 2 g cos k + (1 - delta^2) cos^2 k),
// plus the third branch -2 i kappa. Unstable when Im nu > 0.
struct ModeFrequencies {
  Complex plus, minus;
  Complex z_branch;  // -2 i kappa
};

inline ModeFrequencies mode_frequencies(const ModelParams& p, double k) {
  const double c = std::cos(k);
  const double arg = p.g * p.g + 2.0 * p.g * c + (1.0 - p.delta * p.delta) * c * c;
  const Complex root = std::sqrt(Complex(arg, 0.0));  // Im >= 0 when arg < 0
  ModeFrequencies f;
  f.plus = Complex(0, -p.kappa) + 2.0 * root;
  f.minus = Complex(0, -p.kappa) - 2.0 * root;
  f.z_branch = Complex(0, -2.0 * p.kappa);
  return f;
}

enum class Phase { Trivial, FM, AFM };

inline const char* phase_name(Phase ph) {
  switch (ph) {
    case Phase::Trivial: return "trivial";
    case Phase::FM: return "fm";
    case Phase::AFM: return "afm";
  }
  return "?";
}

struct PhaseLabel {
  Phase phase = Phase::Trivial;
  double k_star = 0.0;       // most unstable wavenumber in [0, pi]
  double growth_rate = 0.0;  // max_k Im nu_k; > 0 iff non-trivial
};

// Maximize Im nu_k: grid of 1025 points plus the analytic extrema of the
// quadratic in cos k (endpoints and interior stationary point).
inline PhaseLabel classify_phase(const ModelParams& p) {
  const double one_m_d2 = 1.0 - p.delta * p.delta;
  auto arg_of = [&](double c) {
    return p.g * p.g + 2.0 * p.g * c + one_m_d2 * c * c;
  };

  double best_c = 1.0;
  double best_arg = arg_of(1.0);
  auto consider = [&](double c) {
    const double a = arg_of(c);
    if (a < best_arg) {
      best_arg = a;
      best_c = c;
    }
  };
  consider(-1.0);
  if (one_m_d2 > 0.0) {
    const double c_int = -p.g / one_m_d2;
    if (c_int >= -1.0 && c_int <= 1.0) consider(c_int);
  }
  constexpr int kGrid = 1025;
  for (int i = 0; i < kGrid; ++i)
    consider(std::cos(M_PI * double(i) / double(kGrid - 1)));

  PhaseLabel out;
  out.growth_rate = 2.0 * std::sqrt(std::max(0.0, -best_arg)) - p.kappa;
  out.k_star = std::acos(std::clamp(best_c, -1.0, 1.0));
  if (out.growth_rate <= 0.0) {
    out.phase = Phase::Trivial;
  } else {
    out.phase = (best_c > 0.0 || (best_c == 0.0 && p.g < 0.0)) ? Phase::FM
                                                               : Phase::AFM;
  }
  return out;
}

// Ising-limit (delta = 1) boundary kappa_c = 2 sqrt(1 - (g -+ 1)^2); zero
// where the argument is negative (trivial state stable at any kappa).
inline double ising_boundary(double g) {
  const double shifted = (g < 0.0) ? (g + 1.0) : (g - 1.0);
  const double arg = 1.0 - shifted * shifted;
  return (arg > 0.0) ? 2.0 * std::sqrt(arg) : 0.0;
}

struct AnsatzRoot {
  double x = 0, y = 0, z = -1;
  bool staggered = false;
  double residual = 0;  // two-sublattice derivative norm at the root
  bool stable = false;
};

namespace detail {

// Two-sublattice reduced dynamics (each site's two neighbors on the other
// sublattice): u = (sA, sB) in R^6.
inline Eigen::Matrix<double, 6, 1> sublattice_derivative(
    const Eigen::Matrix<double, 6, 1>& u, const ModelParams& p) {
  BlochState s;
  s.spins = {u.segment<3>(0), u.segment<3>(3)};
  const BlochState d = bloch_derivative(s, p, Boundary::Ring);
  Eigen::Matrix<double, 6, 1> out;
  out << d.spins[0], d.spins[1];
  return out;
}

inline Eigen::Matrix<double, 6, 6> sublattice_jacobian(
    const Eigen::Matrix<double, 6, 1>& u, const ModelParams& p) {
  const double k = p.kappa, g = p.g, dl = p.delta;
  auto block = [&](const Eigen::Vector3d& self,
                   const Eigen::Vector3d& other) {
    // d F(self) / d self and / d other, neighbor sum = 2 * other
    Eigen::Matrix3d dself, dother;
    dself << -k, 2 * g, -2 * (1 - dl) * other(1),
        -2 * g, -k, 2 * (1 + dl) * other(0),
        2 * (1 - dl) * other(1), -2 * (1 + dl) * other(0), -2 * k;
    dother << 0, -2 * (1 - dl) * self(2), 0,
        2 * (1 + dl) * self(2), 0, 0,
        -2 * (1 + dl) * self(1), 2 * (1 - dl) * self(0), 0;
    return std::make_pair(dself, dother);
  };
  const Eigen::Vector3d sa = u.segment<3>(0), sb = u.segment<3>(3);
  Eigen::Matrix<double, 6, 6> j;
  auto [aa, ab] = block(sa, sb);
  auto [bb, ba] = block(sb, sa);
  j.block<3, 3>(0, 0) = aa;
  j.block<3, 3>(0, 3) = ab;
  j.block<3, 3>(3, 3) = bb;
  j.block<3, 3>(3, 0) = ba;
  return j;
}

inline bool root_stable(const AnsatzRoot& r, const ModelParams& p) {
  Eigen::Matrix<double, 6, 1> u;
  const double sgn = r.staggered ? -1.0 : 1.0;
  u << r.x, r.y, r.z, sgn * r.x, sgn * r.y, r.z;
  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(sublattice_jacobian(u, p));
  return es.eigenvalues().real().maxCoeff() < 1e-9;
}

inline double root_residual(const AnsatzRoot& r, const ModelParams& p) {
  Eigen::Matrix<double, 6, 1> u;
  const double sgn = r.staggered ? -1.0 : 1.0;
  u << r.x, r.y, r.z, sgn * r.x, sgn * r.y, r.z;
  return sublattice_derivative(u, p).norm();
}

}  // namespace detail

// Substitute the uniform (or sign-alternating) ansatz into the Bloch
// equations and solve for the fixed points. The trivial root (0, 0, -1)
// always exists; non-trivial roots come from the quadratic
//   (1 - delta^2) Z^2 - 2 s g Z + g^2 + kappa^2/4 = 0   (s = +-1),
// with X^2 = -(s g - (1 - delta) Z)(Z + 1)/delta back-solved and only
// X^2 >= 0 kept.
inline std::vector<AnsatzRoot> uniform_ansatz_roots(const ModelParams& p,
                                                    bool staggered) {
  std::vector<AnsatzRoot> roots;
  AnsatzRoot trivial;
  trivial.staggered = staggered;
  trivial.residual = detail::root_residual(trivial, p);
  trivial.stable = detail::root_stable(trivial, p);
  roots.push_back(trivial);
  if (p.delta == 0.0 || !(p.kappa > 0.0)) return roots;

  const double s = staggered ? -1.0 : 1.0;
  const double a = 1.0 - p.delta * p.delta;
  const double b = -2.0 * s * p.g;
  const double c = p.g * p.g + 0.25 * p.kappa * p.kappa;
  std::vector<double> zs;
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) > 1e-14) zs.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      zs.push_back((-b + r) / (2.0 * a));
      zs.push_back((-b - r) / (2.0 * a));
    }
  }

  for (double z : zs) {
    const double x2 = -(s * p.g - (1.0 - p.delta) * z) * (z + 1.0) / p.delta;
    if (x2 <= 0.0) continue;  // <= 0 includes the pitchfork point X = 0
    AnsatzRoot r;
    r.staggered = staggered;
    r.z = z;
    r.x = std::sqrt(x2);
    r.y = 2.0 * r.x * (s * (1.0 + p.delta) * z - p.g) / p.kappa;
    r.residual = detail::root_residual(r, p);
    if (r.residual > 1e-8) continue;  // spurious (degenerate back-solve)
    r.stable = detail::root_stable(r, p);
    roots.push_back(r);
  }
  return roots;
}

}  // namespace meanfield
}  // namespace dxy

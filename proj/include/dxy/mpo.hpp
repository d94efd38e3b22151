#pragma once

// Matrix-product-operator representation of the chain density operator and
// its Suzuki-Trotter evolution to the non-equilibrium steady state.
//
// The density operator is expanded in products of single-site Paulis,
//   rho = sum_{i1..iN} c_{i1..iN} sigma^{i1} (x) ... (x) sigma^{iN},
// and the coefficient tensor c is factorized Vidal-style into site tensors
// Gamma^[j] (physical index 0..3) and bond weights lambda^[j]. Because rho
// stays Hermitian, every c is real, and the Liouvillian conjugated into this
// frame is a real matrix: tensors, gates and SVDs are all real arithmetic.
// Gates supplied in the computational vec basis are converted on entry.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "dxy/linalg.hpp"
#include "dxy/model.hpp"
#include "dxy/two_site_density.hpp"

namespace dxy {
namespace mpo {

using model::Matrix16c;
using model::Matrix16d;

inline constexpr const char* kBasisTag = "pauli{I,X,Y,Z};c=Tr(rho sigma)/2^N;real";

// Relative floor below which singular values are dropped and the bond
// shrinks. The floor bounds the noise amplification of the 1/lambda gauge
// step at 1e-6 relative while the discarded weight stays below 1e-20.
inline constexpr double kSingularFloor = 1e-10;

struct SiteTensor {
  // comp[i] is the chi_{j-1} x chi_j matrix for physical index i.
  std::array<Eigen::MatrixXd, 4> comp;

  Eigen::Index rows() const { return comp[0].rows(); }
  Eigen::Index cols() const { return comp[0].cols(); }
};

struct State {
  int n_sites = 0;
  int chi_max = 0;
  std::vector<SiteTensor> gamma;         // n_sites
  std::vector<Eigen::VectorXd> lambda;   // n_sites - 1, descending, > 0
  std::string basis_tag = kBasisTag;

  // truncation bookkeeping
  double last_discarded_weight = 0.0;
  double max_discarded_weight = 0.0;
  double discard_warn_threshold = 1e-4;
  long long discard_warnings = 0;

  int chi(int bond) const { return static_cast<int>(lambda.at(bond).size()); }
};

struct ConvergenceReport {
  double t = 0.0;
  std::vector<double> drifts;  // max observable change per checkpoint
  bool converged = false;
  double final_drift = std::numeric_limits<double>::quiet_NaN();
  double max_discarded_weight = 0.0;
  long long steps = 0;
};

struct Observable {
  enum class Kind { SingleSite, PairSite };
  Kind kind = Kind::SingleSite;
  int axis_a = 3;  // 1 = x, 2 = y, 3 = z
  int site_i = 0;
  int axis_b = 0;
  int site_j = -1;

  static Observable single(int axis, int site) {
    return {Kind::SingleSite, axis, site, 0, -1};
  }
  static Observable pair(int axis_a, int i, int axis_b, int j) {
    return {Kind::PairSite, axis_a, i, axis_b, j};
  }
};

// --- construction ---

inline State init_product(const std::vector<Eigen::Matrix2cd>& local, int chi_max) {
  if (local.empty()) throw std::invalid_argument("init_product: empty chain");
  if (chi_max < 1) throw std::invalid_argument("init_product: chi_max < 1");
  State st;
  st.n_sites = static_cast<int>(local.size());
  st.chi_max = chi_max;
  st.gamma.resize(st.n_sites);
  for (int j = 0; j < st.n_sites; ++j) {
    const Eigen::Matrix2cd& rho = local[j];
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12)
      throw std::invalid_argument("init_product: local density trace != 1 at site " +
                                  std::to_string(j));
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("init_product: local density not Hermitian at site " +
                                  std::to_string(j));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("init_product: local density not PSD at site " +
                                  std::to_string(j));
    for (int i = 0; i < 4; ++i) {
      const Complex c = (rho * pauli::by_index(i)).trace() / 2.0;
      st.gamma[j].comp[i] = Eigen::MatrixXd::Constant(1, 1, c.real());
    }
  }
  st.lambda.assign(st.n_sites - 1, Eigen::VectorXd::Ones(1));
  return st;
}

inline Eigen::Matrix2cd down_density() {
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  r(1, 1) = 1.0;
  return r;
}

inline State all_down(int n_sites, int chi_max) {
  return init_product(std::vector<Eigen::Matrix2cd>(n_sites, down_density()), chi_max);
}

inline State maximally_mixed(int n_sites, int chi_max) {
  return init_product(
      std::vector<Eigen::Matrix2cd>(n_sites, 0.5 * Eigen::Matrix2cd::Identity()),
      chi_max);
}

// --- contraction helpers ---

namespace detail {

// Transfer matrix of site j under a physical-index weight vector.
inline Eigen::MatrixXd transfer(const State& st, int j, const Eigen::Vector4d& w) {
  Eigen::MatrixXd t = w(0) * st.gamma[j].comp[0];
  for (int i = 1; i < 4; ++i)
    if (w(i) != 0.0) t += w(i) * st.gamma[j].comp[i];
  return t;
}

inline const Eigen::Vector4d& trace_weights() {
  static const Eigen::Vector4d w(2.0, 0.0, 0.0, 0.0);  // Tr sigma_i = 2 delta_i0
  return w;
}

inline Eigen::Vector4d axis_weights(int axis) {
  Eigen::Vector4d w = Eigen::Vector4d::Zero();
  w(axis) = 2.0;  // Tr sigma_i sigma_a = 2 delta_ia
  return w;
}

// Row vectors L_k = prod_{m<k} T_m diag(lambda_m); L_0 = [1].
inline std::vector<Eigen::RowVectorXd> prefixes(const State& st) {
  std::vector<Eigen::RowVectorXd> l(st.n_sites + 1);
  l[0] = Eigen::RowVectorXd::Ones(1);
  for (int k = 0; k < st.n_sites; ++k) {
    Eigen::RowVectorXd v = l[k] * transfer(st, k, trace_weights());
    if (k < st.n_sites - 1) v = v.cwiseProduct(st.lambda[k].transpose());
    l[k + 1] = std::move(v);
  }
  return l;
}

// Column vectors R_k = T_k diag(lambda_k) R_{k+1}; R_N = [1].
inline std::vector<Eigen::VectorXd> suffixes(const State& st) {
  std::vector<Eigen::VectorXd> r(st.n_sites + 1);
  r[st.n_sites] = Eigen::VectorXd::Ones(1);
  for (int k = st.n_sites - 1; k >= 0; --k) {
    Eigen::VectorXd v = r[k + 1];
    if (k < st.n_sites - 1) v = st.lambda[k].cwiseProduct(v);
    r[k] = transfer(st, k, trace_weights()) * v;
  }
  return r;
}

}  // namespace detail

inline double global_trace(const State& st) {
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (int j = 0; j < st.n_sites; ++j) {
    v = v * detail::transfer(st, j, detail::trace_weights());
    if (j < st.n_sites - 1) v = v.cwiseProduct(st.lambda[j].transpose());
  }
  return v(0);
}

inline void renormalize_trace(State& st) {
  const double tr = global_trace(st);
  if (!std::isfinite(tr) || std::abs(tr) < 1e-12)
    throw std::runtime_error("renormalize_trace: trace lost (" + std::to_string(tr) + ")");
  for (auto& m : st.gamma[0].comp) m /= tr;
}

inline double measure(const State& st, const Observable& obs) {
  const int n = st.n_sites;
  auto in_range = [&](int s) { return 0 <= s && s < n; };
  if (!in_range(obs.site_i) ||
      (obs.kind == Observable::Kind::PairSite && !in_range(obs.site_j)))
    throw std::invalid_argument("measure: site out of range");
  if (obs.kind == Observable::Kind::PairSite && obs.site_j <= obs.site_i)
    throw std::invalid_argument("measure: need site_i < site_j");

  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (int j = 0; j < n; ++j) {
    Eigen::Vector4d w = detail::trace_weights();
    if (j == obs.site_i) w = detail::axis_weights(obs.axis_a);
    if (obs.kind == Observable::Kind::PairSite && j == obs.site_j)
      w = detail::axis_weights(obs.axis_b);
    v = v * detail::transfer(st, j, w);
    if (j < n - 1) v = v.cwiseProduct(st.lambda[j].transpose());
  }
  return v(0);
}

// Exact contraction onto a site pair; Hermitized and trace-normalized.
inline TwoSiteDensity reduced_density(const State& st, int i, int j) {
  const int n = st.n_sites;
  if (!(0 <= i && i < j && j < n))
    throw std::invalid_argument("reduced_density: need 0 <= i < j < n_sites");

  Eigen::RowVectorXd left = Eigen::RowVectorXd::Ones(1);
  for (int k = 0; k < i; ++k) {
    left = left * detail::transfer(st, k, detail::trace_weights());
    left = left.cwiseProduct(st.lambda[k].transpose());
  }
  Eigen::VectorXd right = Eigen::VectorXd::Ones(1);
  for (int k = n - 1; k > j; --k) {
    Eigen::VectorXd v = right;
    if (k < n - 1) v = st.lambda[k].cwiseProduct(v);
    right = detail::transfer(st, k, detail::trace_weights()) * v;
  }

  Eigen::Matrix4d vals;  // vals(a,b) = <sigma_a_i sigma_b_j> (a=0 -> identity)
  for (int a = 0; a < 4; ++a) {
    Eigen::RowVectorXd va = left * (2.0 * st.gamma[i].comp[a]);
    va = va.cwiseProduct(st.lambda[i].transpose());
    for (int k = i + 1; k < j; ++k) {
      va = va * detail::transfer(st, k, detail::trace_weights());
      va = va.cwiseProduct(st.lambda[k].transpose());
    }
    for (int b = 0; b < 4; ++b) {
      Eigen::RowVectorXd vb = va * (2.0 * st.gamma[j].comp[b]);
      if (j < n - 1) vb = vb.cwiseProduct(st.lambda[j].transpose());
      vals(a, b) = vb.dot(right.transpose());
    }
  }

  const double tr = vals(0, 0);
  if (!(tr > 0.5))
    throw std::runtime_error("reduced_density: trace " + std::to_string(tr) +
                             " < 0.5, state corrupted");
  TwoSiteDensity out;
  out.site_i = i;
  out.site_j = j;
  out.rho.setZero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      out.rho += (vals(a, b) / (4.0 * tr)) *
                 linalg::kron(pauli::by_index(a), pauli::by_index(b));
  out.rho = (0.5 * (out.rho + out.rho.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(out.rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw std::runtime_error("reduced_density: eigenvalue below -1e-8");
  return out;
}

inline double purity(const State& st) {
  // Tr rho^2 = 2^N sum over configurations of c^2
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (int j = 0; j < st.n_sites; ++j) {
    Eigen::MatrixXd e;  // doubled transfer matrix, scaled by 2 per site
    for (int i = 0; i < 4; ++i) {
      Eigen::MatrixXd k = 2.0 * linalg::kron(st.gamma[j].comp[i], st.gamma[j].comp[i]);
      e = (i == 0) ? std::move(k) : (e + k).eval();
    }
    v = v * e;
    if (j < st.n_sites - 1) {
      Eigen::VectorXd l2 =
          linalg::kron(st.lambda[j], st.lambda[j]).col(0);
      v = v.cwiseProduct(l2.transpose());
    }
  }
  return v(0);
}

// --- gates and updates ---

// Convert a vec-basis superoperator gate to the real Pauli frame; throws if
// the gate does not preserve Hermiticity.
inline Matrix16d gate_to_pauli_frame(const Matrix16c& gate_vec_basis) {
  double resid = 0.0;
  Matrix16d g = model::pauli_frame(gate_vec_basis, &resid);
  if (resid > 1e-9)
    throw std::invalid_argument(
        "gate_to_pauli_frame: gate not Hermiticity-preserving (imag residual " +
        std::to_string(resid) + ")");
  return g;
}

// Core pair update with the gate already in the real Pauli frame.
inline void pair_update(State& st, int bond, const Matrix16d& gate) {
  const int n = st.n_sites;
  if (bond < 0 || bond >= n - 1)
    throw std::invalid_argument("pair_update: bond out of range");

  const Eigen::VectorXd ones1 = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd& lam_l = (bond > 0) ? st.lambda[bond - 1] : ones1;
  const Eigen::VectorXd& lam_m = st.lambda[bond];
  const Eigen::VectorXd& lam_r = (bond + 2 <= n - 1) ? st.lambda[bond + 1] : ones1;
  const Eigen::Index chi_l = lam_l.size(), chi_m = lam_m.size(), chi_r = lam_r.size();

  // two-site tensor in matrix form, rows (i, a), cols (j, b)
  std::array<Eigen::MatrixXd, 4> a_blk, b_blk;
  for (int i = 0; i < 4; ++i) {
    a_blk[i] = lam_l.asDiagonal() * st.gamma[bond].comp[i] * lam_m.asDiagonal();
    b_blk[i] = st.gamma[bond + 1].comp[i] * lam_r.asDiagonal();
  }
  Eigen::MatrixXd theta(4 * chi_l, 4 * chi_r);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      theta.block(i * chi_l, j * chi_r, chi_l, chi_r).noalias() = a_blk[i] * b_blk[j];

  if (!theta.allFinite())
    throw std::runtime_error("pair_update: non-finite two-site tensor");

  // apply the gate on the 16-dimensional pair-physical space
  Eigen::MatrixXd flat(chi_l * chi_r, 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Eigen::MatrixXd blk = theta.block(i * chi_l, j * chi_r, chi_l, chi_r);
      flat.col(4 * i + j) = Eigen::Map<Eigen::VectorXd>(blk.data(), blk.size());
    }
  Eigen::MatrixXd flat_out = flat * gate.transpose();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      theta.block(i * chi_l, j * chi_r, chi_l, chi_r) =
          Eigen::Map<Eigen::MatrixXd>(flat_out.col(4 * i + j).data(), chi_l, chi_r);

  auto svd = linalg::svd(theta);

  // rank selection: relative floor, then the chi_max cap
  const double total = svd.s.squaredNorm();
  const double floor = svd.s(0) * kSingularFloor;
  int rank = 0;
  while (rank < svd.s.size() && svd.s(rank) > floor) ++rank;
  rank = std::max(1, std::min({rank, st.chi_max,
                               static_cast<int>(svd.s.size())}));
  double kept = svd.s.head(rank).squaredNorm();
  st.last_discarded_weight = (total > 0.0) ? (total - kept) / total : 0.0;
  st.max_discarded_weight = std::max(st.max_discarded_weight, st.last_discarded_weight);
  if (st.last_discarded_weight > st.discard_warn_threshold) ++st.discard_warnings;

  st.lambda[bond] = svd.s.head(rank);
  Eigen::VectorXd inv_l = lam_l.cwiseInverse();
  Eigen::VectorXd inv_r = lam_r.cwiseInverse();
  for (int i = 0; i < 4; ++i) {
    st.gamma[bond].comp[i] =
        inv_l.asDiagonal() * svd.u.block(i * chi_l, 0, chi_l, rank);
    st.gamma[bond + 1].comp[i] =
        svd.v.block(i * chi_r, 0, chi_r, rank).transpose() * inv_r.asDiagonal();
  }
}

// Public variant taking the gate in the computational vec basis, as produced
// by exponentiating a PairGenerator matrix.
inline void pair_update(State& st, int bond, const Matrix16c& gate_vec_basis) {
  pair_update(st, bond, gate_to_pauli_frame(gate_vec_basis));
}

// Pauli-frame bond propagators for one (params, dt): exp(M_b dt) and
// exp(M_b dt/2), computed once via scaling-and-squaring Pade.
struct GateSet {
  ModelParams params;
  double dt = 0.0;
  std::vector<Matrix16d> full;  // per bond
  std::vector<Matrix16d> half;
};

inline GateSet build_gate_set(const ModelParams& p, double dt,
                              model::SplitConvention split =
                                  model::SplitConvention::SymmetricHalves) {
  if (!(dt > 0.0)) throw std::invalid_argument("build_gate_set: dt <= 0");
  GateSet gs;
  gs.params = p;
  gs.dt = dt;
  gs.full.resize(p.n_sites - 1);
  gs.half.resize(p.n_sites - 1);
  for (int b = 0; b + 1 < p.n_sites; ++b) {
    double resid = 0.0;
    const Matrix16d m = model::pauli_frame(
        model::build_pair_generator(p, b, split).matrix, &resid);
    if (resid > 1e-12)
      throw std::runtime_error("build_gate_set: generator not real in Pauli frame");
    gs.full[b] = (m * dt).exp();
    gs.half[b] = (m * (0.5 * dt)).exp();
  }
  return gs;
}

// Second-order step exp(M_odd dt/2) exp(M_even dt) exp(M_odd dt/2). Odd
// bonds are 0, 2, ... (they couple sites 1-2, 3-4, ... counting from 1).
inline void trotter_step(State& st, const GateSet& gs) {
  const int nb = st.n_sites - 1;
  if (nb < 1) throw std::invalid_argument("trotter_step: need n_sites >= 2");
  for (int b = 0; b < nb; b += 2) pair_update(st, b, gs.half[b]);
  for (int b = 1; b < nb; b += 2) pair_update(st, b, gs.full[b]);
  for (int b = 0; b < nb; b += 2) pair_update(st, b, gs.half[b]);
  renormalize_trace(st);
}

inline void trotter_step(State& st, const ModelParams& p, double dt) {
  trotter_step(st, build_gate_set(p, dt));
}

namespace detail {

// Monitored observable vector: <sz_j> for all j and <sx_j sx_{j+1}> for all
// bonds, from one prefix/suffix sweep.
inline Eigen::VectorXd monitor_observables(const State& st) {
  const int n = st.n_sites;
  const auto l = prefixes(st);
  const auto r = suffixes(st);
  Eigen::VectorXd out(2 * n - 1);
  for (int j = 0; j < n; ++j) {
    Eigen::RowVectorXd v = l[j] * (2.0 * st.gamma[j].comp[3]);
    if (j < n - 1) v = v.cwiseProduct(st.lambda[j].transpose());
    out(j) = v.dot(r[j + 1].transpose());
  }
  for (int b = 0; b + 1 < n; ++b) {
    Eigen::RowVectorXd v = l[b] * (2.0 * st.gamma[b].comp[1]);
    v = v.cwiseProduct(st.lambda[b].transpose());
    v = v * (2.0 * st.gamma[b + 1].comp[1]);
    if (b + 1 < n - 1) v = v.cwiseProduct(st.lambda[b + 1].transpose());
    out(n + b) = v.dot(r[b + 2].transpose());
  }
  return out;
}

}  // namespace detail

// Evolve until the monitored observables ({<sz_j>}, {<sx_j sx_j+1>}) drift
// less than tol between consecutive checkpoints, or until t_max. Inside a
// checkpoint segment consecutive odd half-steps are merged, which is the
// exact composition of the second-order steps with fewer truncations.
inline ConvergenceReport evolve_steady(State& st, const ModelParams& p, double dt,
                                       double check_interval, double tol,
                                       double t_max) {
  if (!(tol > 0.0)) throw std::invalid_argument("evolve_steady: tol <= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_steady: dt <= 0");
  if (check_interval < dt)
    throw std::invalid_argument("evolve_steady: check_interval < dt");
  if (st.n_sites != p.n_sites)
    throw std::invalid_argument("evolve_steady: state/params size mismatch");
  if (st.n_sites < 2)
    throw std::invalid_argument("evolve_steady: need n_sites >= 2");

  const GateSet gs = build_gate_set(p, dt);
  const int nb = st.n_sites - 1;
  const int steps_per_segment = std::max(1, static_cast<int>(std::llround(check_interval / dt)));

  auto odd = [&](const std::vector<Matrix16d>& g) {
    for (int b = 0; b < nb; b += 2) pair_update(st, b, g[b]);
  };
  auto even = [&](const std::vector<Matrix16d>& g) {
    for (int b = 1; b < nb; b += 2) pair_update(st, b, g[b]);
  };

  ConvergenceReport rep;
  Eigen::VectorXd prev = detail::monitor_observables(st);
  while (rep.t < t_max) {
    odd(gs.half);
    for (int s = 1; s < steps_per_segment; ++s) {
      even(gs.full);
      odd(gs.full);
    }
    even(gs.full);
    odd(gs.half);
    renormalize_trace(st);
    rep.steps += steps_per_segment;
    rep.t += steps_per_segment * dt;

    Eigen::VectorXd cur = detail::monitor_observables(st);
    if (!cur.allFinite())
      throw std::runtime_error("evolve_steady: non-finite observables at t=" +
                               std::to_string(rep.t));
    const double drift = (cur - prev).cwiseAbs().maxCoeff();
    rep.drifts.push_back(drift);
    rep.final_drift = drift;
    prev = std::move(cur);
    if (drift < tol) {
      rep.converged = true;
      break;
    }
  }
  rep.max_discarded_weight = st.max_discarded_weight;
  return rep;
}

// In the Pauli frame the duality rho -> R_odd rho^* R_odd at fixed g is a
// per-site sign flip: sx components change sign on the odd sublattice
// (sites 1, 3, ... counting from 1), sy components on the even one. The
// resulting state evolves, under the master equation at -g, exactly as the
// original did at +g.
inline void apply_sublattice_duality(State& st) {
  for (int j = 0; j < st.n_sites; ++j) {
    if (j % 2 == 0)
      st.gamma[j].comp[1] = -st.gamma[j].comp[1];
    else
      st.gamma[j].comp[2] = -st.gamma[j].comp[2];
  }
}

// --- checkpoint I/O (format documented in the README) ---

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace detail

inline void save_checkpoint(const State& st, const ModelParams& p,
                            const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  os.write("DXYMPO1\n", 8);
  detail::write_pod<std::int32_t>(os, st.n_sites);
  detail::write_pod<std::int32_t>(os, st.chi_max);
  detail::write_pod<double>(os, p.g);
  detail::write_pod<double>(os, p.delta);
  detail::write_pod<double>(os, p.kappa);
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(st.basis_tag.size()));
  os.write(st.basis_tag.data(), static_cast<std::streamsize>(st.basis_tag.size()));
  for (const auto& lam : st.lambda) {
    detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(lam.size()));
    os.write(reinterpret_cast<const char*>(lam.data()),
             static_cast<std::streamsize>(lam.size() * sizeof(double)));
  }
  for (const auto& site : st.gamma)
    for (const auto& m : site.comp) {
      detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
      detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
      os.write(reinterpret_cast<const char*>(m.data()),
               static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
  if (!os) throw std::runtime_error("save_checkpoint: write failed");
}

inline std::pair<State, ModelParams> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "DXYMPO1\n")
    throw std::runtime_error("load_checkpoint: bad magic");
  State st;
  ModelParams p;
  st.n_sites = detail::read_pod<std::int32_t>(is);
  st.chi_max = detail::read_pod<std::int32_t>(is);
  p.g = detail::read_pod<double>(is);
  p.delta = detail::read_pod<double>(is);
  p.kappa = detail::read_pod<double>(is);
  p.n_sites = st.n_sites;
  const auto tag_len = detail::read_pod<std::uint32_t>(is);
  st.basis_tag.resize(tag_len);
  is.read(st.basis_tag.data(), tag_len);
  if (st.basis_tag != kBasisTag)
    throw std::runtime_error("load_checkpoint: unknown basis tag " + st.basis_tag);
  st.lambda.resize(st.n_sites - 1);
  for (auto& lam : st.lambda) {
    const auto sz = detail::read_pod<std::uint64_t>(is);
    lam.resize(static_cast<Eigen::Index>(sz));
    is.read(reinterpret_cast<char*>(lam.data()),
            static_cast<std::streamsize>(sz * sizeof(double)));
  }
  st.gamma.resize(st.n_sites);
  for (auto& site : st.gamma)
    for (auto& m : site.comp) {
      const auto rows = detail::read_pod<std::uint64_t>(is);
      const auto cols = detail::read_pod<std::uint64_t>(is);
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      is.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
  if (!is) throw std::runtime_error("load_checkpoint: truncated file");
  return {std::move(st), p};
}

}  // namespace mpo
}  // namespace dxy

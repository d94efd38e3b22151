#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/MatrixFunctions>
#include <cstdio>

#include "dxy/correlations.hpp"
#include "dxy/mpo.hpp"
#include "dxy/oracle.hpp"
#include "support/random_states.hpp"

using namespace dxy;

namespace {

std::vector<Eigen::Matrix2cd> random_locals(int n, std::mt19937& rng) {
  std::vector<Eigen::Matrix2cd> v;
  for (int j = 0; j < n; ++j) v.push_back(dxy_test::random_density(2, rng));
  return v;
}

}  // namespace

TEST_CASE("init_product: all-down and maximally mixed") {
  const auto down = mpo::all_down(10, 8);
  CHECK(mpo::global_trace(down) == Catch::Approx(1.0).margin(1e-14));
  for (int j = 0; j < 10; ++j) {
    CHECK(mpo::measure(down, mpo::Observable::single(3, j)) ==
          Catch::Approx(-1.0).margin(1e-14));
    CHECK(std::abs(mpo::measure(down, mpo::Observable::single(1, j))) < 1e-14);
  }
  CHECK(mpo::measure(down, mpo::Observable::pair(3, 2, 3, 7)) ==
        Catch::Approx(1.0).margin(1e-14));

  const auto mixed = mpo::maximally_mixed(6, 8);
  for (int j = 0; j < 6; ++j)
    for (int axis : {1, 2, 3})
      CHECK(std::abs(mpo::measure(mixed, mpo::Observable::single(axis, j))) < 1e-14);

  const auto two = mpo::all_down(2, 4);
  const auto red = mpo::reduced_density(two, 0, 1);
  Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
  expected(3, 3) = 1.0;
  CHECK((red.rho - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("init_product rejects invalid local densities") {
  Eigen::Matrix2cd bad_trace = 0.7 * Eigen::Matrix2cd::Identity();
  CHECK_THROWS_AS(mpo::init_product({bad_trace}, 4), std::invalid_argument);
  Eigen::Matrix2cd not_psd;
  not_psd << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(mpo::init_product({not_psd}, 4), std::invalid_argument);
}

TEST_CASE("identity gate leaves observables unchanged") {
  std::mt19937 rng(41);
  ModelParams p{-0.6, 0.8, 0.4, 3};
  auto st = mpo::init_product(random_locals(3, rng), 16);
  const auto gs = mpo::build_gate_set(p, 0.05);
  for (int s = 0; s < 10; ++s) mpo::trotter_step(st, gs);

  std::vector<double> before;
  for (int j = 0; j < 3; ++j)
    for (int axis : {1, 2, 3})
      before.push_back(mpo::measure(st, mpo::Observable::single(axis, j)));
  const auto red_before = mpo::reduced_density(st, 0, 2);

  mpo::pair_update(st, 0, mpo::Matrix16d::Identity().eval());
  mpo::pair_update(st, 1, mpo::Matrix16d::Identity().eval());

  int idx = 0;
  for (int j = 0; j < 3; ++j)
    for (int axis : {1, 2, 3})
      CHECK(std::abs(mpo::measure(st, mpo::Observable::single(axis, j)) -
                     before[idx++]) < 1e-12);
  CHECK((mpo::reduced_density(st, 0, 2).rho - red_before.rho).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("pair update matches dense propagation of the vectorized pair") {
  std::mt19937 rng(43);
  ModelParams p{-0.7, 0.8, 0.6, 2};
  const double dt = 0.05;
  const mpo::Matrix16c gate =
      (model::build_pair_generator(p, 0).matrix * Complex(dt, 0)).exp();

  const auto locals = random_locals(2, rng);
  auto st = mpo::init_product(locals, 16);
  Eigen::VectorXcd dense = linalg::vectorize(linalg::kron(locals[0], locals[1]));
  for (int s = 0; s < 10; ++s) {
    mpo::pair_update(st, 0, gate);
    dense = gate * dense;
  }
  const Eigen::Matrix4cd dense_rho = linalg::unvectorize(dense, 4);
  const auto red = mpo::reduced_density(st, 0, 1);
  CHECK((red.rho - dense_rho / dense_rho.trace().real()).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("truncation caps the bond dimension and records weight") {
  std::mt19937 rng(47);
  ModelParams p{-1.0, 1.0, 0.5, 4};
  auto st = mpo::init_product(random_locals(4, rng), 2);  // tight cap
  const auto gs = mpo::build_gate_set(p, 0.05);
  for (int s = 0; s < 20; ++s) mpo::trotter_step(st, gs);
  for (int b = 0; b < 3; ++b) CHECK(st.chi(b) <= 2);
  CHECK(st.max_discarded_weight > 0.0);
}

TEST_CASE("all-down is a fixed point at delta = 0") {
  ModelParams p{0.4, 0.0, 0.7, 5};
  auto st = mpo::all_down(5, 8);
  const auto gs = mpo::build_gate_set(p, 0.01);
  for (int s = 0; s < 20; ++s) mpo::trotter_step(st, gs);
  CHECK(mpo::global_trace(st) == Catch::Approx(1.0).margin(1e-12));
  for (int j = 0; j < 5; ++j) {
    CHECK(mpo::measure(st, mpo::Observable::single(3, j)) ==
          Catch::Approx(-1.0).margin(1e-12));
    CHECK(std::abs(mpo::measure(st, mpo::Observable::single(1, j))) < 1e-12);
    CHECK(std::abs(mpo::measure(st, mpo::Observable::single(2, j))) < 1e-12);
  }
}

TEST_CASE("closed-system evolution of a pure product state stays pure") {
  ModelParams p{-1.0, 1.0, 0.0, 4};
  auto st = mpo::all_down(4, 16);
  const auto gs = mpo::build_gate_set(p, 0.01);
  for (int s = 0; s < 10; ++s) {
    mpo::trotter_step(st, gs);
    CHECK(std::abs(mpo::global_trace(st) - 1.0) < 1e-6);
    CHECK(std::abs(mpo::purity(st) - 1.0) < 1e-6);
  }
}

TEST_CASE("trace is preserved without renormalization (truncation error only)") {
  // at N=4, chi_max=16 the representation is rank-exact, so the drift is the
  // trace error of the gates themselves plus roundoff
  ModelParams p{-1.0, 1.0, 0.5, 4};
  auto st = mpo::all_down(4, 16);
  const auto gs = mpo::build_gate_set(p, 0.02);
  for (int s = 0; s < 50; ++s) {  // one unit of simulated time, no renorm
    for (int b = 0; b < 3; b += 2) mpo::pair_update(st, b, gs.half[b]);
    mpo::pair_update(st, 1, gs.full[1]);
    for (int b = 0; b < 3; b += 2) mpo::pair_update(st, b, gs.half[b]);
  }
  CHECK(std::abs(mpo::global_trace(st) - 1.0) < 1e-6);

  // with truncation active the drift per unit time is bounded by the
  // recorded discarded weight, not by the gates
  ModelParams p6{-1.0, 1.0, 0.5, 6};
  auto st6 = mpo::all_down(6, 20);
  REQUIRE(mpo::evolve_steady(st6, p6, 0.02, 1.0, 1e-6, 120.0).converged);
  const auto gs6 = mpo::build_gate_set(p6, 0.02);
  for (int s = 0; s < 50; ++s) {
    for (int b = 0; b < 5; b += 2) mpo::pair_update(st6, b, gs6.half[b]);
    for (int b = 1; b < 5; b += 2) mpo::pair_update(st6, b, gs6.full[b]);
    for (int b = 0; b < 5; b += 2) mpo::pair_update(st6, b, gs6.half[b]);
  }
  CHECK(std::abs(mpo::global_trace(st6) - 1.0) < 1e-4);
}

TEST_CASE("chi saturation: N=4 with chi_max=16 equals dense Trotter evolution") {
  ModelParams p{-1.0, 1.0, 0.5, 4};
  const double dt = 0.02;

  std::array<Eigen::MatrixXcd, 3> dense_half, dense_full;
  for (int b = 0; b < 3; ++b) {
    const Eigen::MatrixXcd lb =
        model::embed_pair_superop(model::build_pair_generator(p, b).matrix, b, 4);
    dense_half[b] = (lb * Complex(dt / 2, 0)).exp();
    dense_full[b] = (lb * Complex(dt, 0)).exp();
  }

  auto st = mpo::all_down(4, 16);
  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(16, 16);
  rho0(15, 15) = 1.0;
  Eigen::VectorXcd dense = linalg::vectorize(rho0);

  const auto gs = mpo::build_gate_set(p, dt);
  for (int s = 0; s < 50; ++s) {
    mpo::trotter_step(st, gs);
    dense = dense_half[0] * (dense_half[2] * dense);
    dense = dense_full[1] * dense;
    dense = dense_half[0] * (dense_half[2] * dense);
  }
  oracle::DensityVector dv;
  dv.n_sites = 4;
  dv.vec = dense / linalg::unvectorize(dense, 16).trace();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const auto a = mpo::reduced_density(st, i, j);
      const auto b = oracle::reduce(dv, i, j);
      CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("steady state at N=4 matches exact diagonalization") {
  ModelParams p{-1.0, 1.0, 0.5, 4};
  auto st = mpo::all_down(4, 20);
  const auto rep = mpo::evolve_steady(st, p, 0.01, 1.0, 1e-6, 300.0);
  REQUIRE(rep.converged);

  const auto exact = oracle::steady_state(oracle::build_liouvillian(p));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const auto a = mpo::reduced_density(st, i, j);
      const auto b = oracle::reduce(exact, i, j);
      CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-3);
    }
  const double xx_mpo = mpo::measure(st, mpo::Observable::pair(1, 1, 1, 2));
  const double xx_exact = corr::pair_correlator(oracle::reduce(exact, 1, 2), 1, 1);
  CHECK(std::abs(xx_mpo - xx_exact) < 1e-3);
  CHECK(corr::negativity(mpo::reduced_density(st, 1, 2)) ==
        Catch::Approx(corr::negativity(oracle::reduce(exact, 1, 2))).margin(1e-3));

  // steady-state reductions stay PSD
  for (int i = 0; i < 3; ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
        mpo::reduced_density(st, i, i + 1).rho, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-6);
  }
}

TEST_CASE("steady state is independent of the initial condition") {
  ModelParams p{-1.0, 1.0, 0.5, 4};
  auto a = mpo::all_down(4, 20);
  auto b = mpo::maximally_mixed(4, 20);
  REQUIRE(mpo::evolve_steady(a, p, 0.01, 1.0, 1e-7, 300.0).converged);
  REQUIRE(mpo::evolve_steady(b, p, 0.01, 1.0, 1e-7, 300.0).converged);
  for (int j = 0; j < 4; ++j)
    CHECK(mpo::measure(a, mpo::Observable::single(3, j)) ==
          Catch::Approx(mpo::measure(b, mpo::Observable::single(3, j))).margin(1e-5));
  CHECK(mpo::measure(a, mpo::Observable::pair(1, 1, 1, 2)) ==
        Catch::Approx(mpo::measure(b, mpo::Observable::pair(1, 1, 1, 2))).margin(1e-5));
}

TEST_CASE("convergence to the trivial state at delta = 0 from a mixed start") {
  ModelParams p{0.3, 0.0, 0.5, 10};
  auto st = mpo::maximally_mixed(10, 8);
  const auto rep = mpo::evolve_steady(st, p, 0.01, 1.0, 1e-9, 100.0);
  REQUIRE(rep.converged);
  for (int j = 0; j < 10; ++j) {
    CHECK(std::abs(mpo::measure(st, mpo::Observable::single(1, j))) < 1e-8);
    CHECK(std::abs(mpo::measure(st, mpo::Observable::single(2, j))) < 1e-8);
    CHECK(std::abs(mpo::measure(st, mpo::Observable::single(3, j)) + 1.0) < 1e-8);
  }
}

TEST_CASE("x correlators vanish in the steady state at g = 0, delta = 1") {
  ModelParams p{0.0, 1.0, 0.5, 8};
  auto st = mpo::all_down(8, 20);
  REQUIRE(mpo::evolve_steady(st, p, 0.01, 1.0, 1e-7, 300.0).converged);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      CHECK(std::abs(mpo::measure(st, mpo::Observable::pair(1, i, 1, j))) < 1e-6);
}

TEST_CASE("halving dt leaves the center magnetization within 1e-4 (N=8)") {
  ModelParams p{-1.0, 1.0, 0.5, 8};
  double value[2];
  int idx = 0;
  for (double dt : {0.02, 0.01}) {
    auto st = mpo::all_down(8, 20);
    REQUIRE(mpo::evolve_steady(st, p, dt, 1.0, 1e-7, 300.0).converged);
    value[idx++] = mpo::measure(st, mpo::Observable::single(3, 4));
  }
  CHECK(std::abs(value[0] - value[1]) < 1e-4);
}

TEST_CASE("mpo duality: trajectories at +g and -g are sign-flip related") {
  const double t_end = 2.0;
  ModelParams pp{0.8, 1.0, 0.5, 4};
  ModelParams pm{-0.8, 1.0, 0.5, 4};
  auto sp = mpo::all_down(4, 20);
  auto sm = mpo::all_down(4, 20);
  const auto gp = mpo::build_gate_set(pp, 0.01);
  const auto gm = mpo::build_gate_set(pm, 0.01);
  for (int s = 0; s < int(t_end / 0.01); ++s) {
    mpo::trotter_step(sp, gp);
    mpo::trotter_step(sm, gm);
  }
  mpo::apply_sublattice_duality(sp);  // now represents the -g trajectory
  for (int j = 0; j < 4; ++j)
    CHECK(mpo::measure(sp, mpo::Observable::single(3, j)) ==
          Catch::Approx(mpo::measure(sm, mpo::Observable::single(3, j))).margin(1e-10));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      CHECK(mpo::measure(sp, mpo::Observable::pair(1, i, 1, j)) ==
            Catch::Approx(mpo::measure(sm, mpo::Observable::pair(1, i, 1, j)))
                .margin(1e-10));
}

TEST_CASE("checkpoint round-trip") {
  std::mt19937 rng(53);
  ModelParams p{-0.9, 0.7, 0.5, 5};
  auto st = mpo::init_product(random_locals(5, rng), 12);
  const auto gs = mpo::build_gate_set(p, 0.02);
  for (int s = 0; s < 25; ++s) mpo::trotter_step(st, gs);

  const std::string path = "mpo_checkpoint_test.bin";
  mpo::save_checkpoint(st, p, path);
  const auto [loaded, params] = mpo::load_checkpoint(path);
  std::remove(path.c_str());

  CHECK(params.g == p.g);
  CHECK(params.delta == p.delta);
  CHECK(params.kappa == p.kappa);
  REQUIRE(loaded.n_sites == st.n_sites);
  for (int b = 0; b < 4; ++b)
    CHECK((loaded.lambda[b] - st.lambda[b]).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 4; ++i)
      CHECK((loaded.gamma[j].comp[i] - st.gamma[j].comp[i]).cwiseAbs().maxCoeff() ==
            0.0);
}

TEST_CASE("measure argument validation") {
  const auto st = mpo::all_down(4, 4);
  CHECK_THROWS_AS(mpo::measure(st, mpo::Observable::single(3, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mpo::measure(st, mpo::Observable::pair(1, 2, 1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mpo::reduced_density(st, 2, 1), std::invalid_argument);
}

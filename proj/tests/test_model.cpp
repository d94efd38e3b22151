#include <catch2/catch_amalgamated.hpp>

#include "dxy/linalg.hpp"
#include "dxy/model.hpp"
#include "dxy/oracle.hpp"
#include "support/random_states.hpp"

using namespace dxy;
using dxy_test::random_density;
using dxy_test::random_hermitian;

TEST_CASE("params validation") {
  ModelParams p{0.0, 0.0, -0.1, 4};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {0.0, 0.0, 0.5, 0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {1.0, 0.5, 0.5, 4};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("vectorization convention: A rho B = unvec(kron(B^T, A) vec rho)") {
  std::mt19937 rng(7);
  const Eigen::MatrixXcd a = dxy_test::random_complex(2, 2, rng);
  const Eigen::MatrixXcd b = dxy_test::random_complex(2, 2, rng);
  const Eigen::MatrixXcd rho = dxy_test::random_complex(2, 2, rng);
  const Eigen::MatrixXcd lhs = a * rho * b;
  const Eigen::MatrixXcd rhs = linalg::unvectorize(
      linalg::sandwich_superop(a, b) * linalg::vectorize(rho), 2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pair generator annihilates the identity when g = delta = kappa = 0") {
  ModelParams p{0.0, 0.0, 0.0, 4};
  for (int bond : {0, 1, 2}) {
    const auto gen = model::build_pair_generator(p, bond);
    const Eigen::VectorXcd lhs =
        gen.matrix * linalg::vectorize(Eigen::Matrix4cd::Identity());
    // [H, 1] = 0 for any H; no dissipator here
    CHECK(lhs.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("pair generator output is traceless (trace preservation)") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  for (int rep = 0; rep < 5; ++rep) {
    ModelParams p{ud(rng), ud(rng), std::abs(ud(rng)), 5};
    const auto gen = model::build_pair_generator(p, rep % 4);
    const Eigen::RowVectorXcd tr_functional =
        linalg::vectorize(Eigen::Matrix4cd::Identity()).adjoint() * gen.matrix;
    CHECK(tr_functional.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pair generator preserves Hermiticity") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    ModelParams p{ud(rng), ud(rng), std::abs(ud(rng)), 4};
    const auto gen = model::build_pair_generator(p, 1);
    const Eigen::MatrixXcd h = random_hermitian(4, rng);
    const Eigen::MatrixXcd out =
        linalg::unvectorize(gen.matrix * linalg::vectorize(h), 4);
    CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pair generator is real in the Pauli frame") {
  ModelParams p{-1.0, 1.0, 0.5, 4};
  double resid = 1.0;
  model::pauli_frame(model::build_pair_generator(p, 1).matrix, &resid);
  CHECK(resid < 1e-13);
}

TEST_CASE("embedded pair generators sum to the exact Liouvillian (N=3)") {
  ModelParams p{-1.0, 1.0, 0.5, 3};
  const Eigen::MatrixXcd exact = oracle::build_liouvillian(p).matrix;
  for (auto split : {model::SplitConvention::SymmetricHalves,
                     model::SplitConvention::LeftAnchored}) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(64, 64);
    for (int b = 0; b < 2; ++b)
      sum += model::embed_pair_superop(
          model::build_pair_generator(p, b, split).matrix, b, 3);
    CHECK((sum - exact).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pair generator argument errors") {
  ModelParams p{0.0, 1.0, 0.5, 3};
  CHECK_THROWS_AS(model::build_pair_generator(p, 2), std::invalid_argument);
  CHECK_THROWS_AS(model::build_pair_generator(p, -1), std::invalid_argument);
  p.n_sites = 1;
  CHECK_THROWS_AS(model::build_pair_generator(p, 0), std::invalid_argument);
}

TEST_CASE("sublattice duality: fixed point and involution") {
  const int n = 3;
  const Eigen::Index dim = 1 << n;
  Eigen::MatrixXcd all_down = Eigen::MatrixXcd::Zero(dim, dim);
  all_down(dim - 1, dim - 1) = 1.0;
  CHECK((model::apply_sublattice_duality(all_down, n) - all_down)
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  std::mt19937 rng(17);
  const Eigen::MatrixXcd rho = random_density(int(dim), rng);
  const Eigen::MatrixXcd twice = model::apply_sublattice_duality(
      model::apply_sublattice_duality(rho, n), n);
  CHECK((twice - rho).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("sublattice duality maps the steady state at g to the one at -g") {
  for (double g : {0.7, 1.0}) {
    ModelParams plus{g, 1.0, 0.5, 4};
    ModelParams minus{-g, 1.0, 0.5, 4};
    const Eigen::MatrixXcd rho_p =
        oracle::steady_state(oracle::build_liouvillian(plus)).as_matrix();
    const Eigen::MatrixXcd rho_m =
        oracle::steady_state(oracle::build_liouvillian(minus)).as_matrix();
    const Eigen::MatrixXcd mapped = model::apply_sublattice_duality(rho_p, 4);
    CHECK((mapped - rho_m).cwiseAbs().maxCoeff() < 1e-8);
  }
}

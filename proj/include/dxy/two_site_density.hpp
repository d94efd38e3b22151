#pragma once

// Reduced density operator of a site pair, the common currency between the
// MPO engine, the exact oracle and the correlation measures.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "dxy/linalg.hpp"

namespace dxy {

// 4x4 Hermitian, unit trace. Basis order |uu>, |ud>, |du>, |dd> where the
// first label is the lower site index.
struct TwoSiteDensity {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  int site_i = -1;
  int site_j = -1;

  void validate(double eig_tol = 1e-8) const {
    if (std::abs(rho.trace().real() - 1.0) > 1e-8 ||
        std::abs(rho.trace().imag()) > 1e-10)
      throw std::invalid_argument("TwoSiteDensity: trace != 1");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("TwoSiteDensity: not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -eig_tol)
      throw std::invalid_argument("TwoSiteDensity: negative eigenvalue");
  }
};

}  // namespace dxy

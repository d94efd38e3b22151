#pragma once

// Small dense linear-algebra helpers shared across the library:
// LAPACK-backed SVD (gesdd with gesvd fallback), Kronecker products and
// column-stacking vectorization in one fixed convention.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CPP
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace dxy {

using Complex = std::complex<double>;

namespace linalg {

struct SvdReal {
  Eigen::MatrixXd u;       // m x r
  Eigen::VectorXd s;       // r, descending
  Eigen::MatrixXd v;       // n x r, A = u * s.asDiagonal() * v.transpose()
};

struct SvdComplex {
  Eigen::MatrixXcd u;
  Eigen::VectorXd s;
  Eigen::MatrixXcd v;      // A = u * s.asDiagonal() * v.adjoint()
};

inline SvdReal svd(const Eigen::MatrixXd& a) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  const int r = std::min(m, n);
  SvdReal out;
  out.u.resize(m, r);
  out.s.resize(r);
  out.v.resize(n, r);
  Eigen::MatrixXd work = a;
  Eigen::MatrixXd vt(r, n);
  int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                            out.s.data(), out.u.data(), m, vt.data(), r);
  if (info != 0) {
    // gesdd occasionally fails to converge; gesvd is slower but sturdier.
    work = a;
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, work.data(), m,
                          out.s.data(), out.u.data(), m, vt.data(), r,
                          nullptr);
    if (info != 0)
      throw std::runtime_error("svd: LAPACK failed with info=" +
                               std::to_string(info));
  }
  out.v = vt.transpose();
  return out;
}

inline SvdComplex svd(const Eigen::MatrixXcd& a) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  const int r = std::min(m, n);
  SvdComplex out;
  out.u.resize(m, r);
  out.s.resize(r);
  out.v.resize(n, r);
  Eigen::MatrixXcd work = a;
  Eigen::MatrixXcd vh(r, n);
  int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                            out.s.data(), out.u.data(), m, vh.data(), r);
  if (info != 0) {
    work = a;
    Eigen::VectorXd superb(std::max(1, r - 1));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, work.data(), m,
                          out.s.data(), out.u.data(), m, vh.data(), r,
                          superb.data());
    if (info != 0)
      throw std::runtime_error("svd: LAPACK failed with info=" +
                               std::to_string(info));
  }
  out.v = vh.adjoint();
  return out;
}

template <typename A, typename B>
Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Mat = Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-stacking: vec(rho)[c*d + r] = rho(r, c), so vec(A rho B) =
// kron(B^T, A) vec(rho). This is the one vectorization convention used
// everywhere in the library.
inline Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

inline Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, Eigen::Index d) {
  if (v.size() != d * d)
    throw std::invalid_argument("unvectorize: size mismatch");
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

// Superoperator for rho -> A rho B in the column-stacking convention.
inline Eigen::MatrixXcd sandwich_superop(const Eigen::MatrixXcd& a,
                                         const Eigen::MatrixXcd& b) {
  return kron(b.transpose(), a);
}

}  // namespace linalg
}  // namespace dxy

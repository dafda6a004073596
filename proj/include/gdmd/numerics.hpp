#pragma once

// Dense linear algebra used across the library: truncated SVD, general
// eigendecomposition and the Moore-Penrose pseudo-inverse. Everything is a
// thin contract layer over Eigen so the callers only see the truncation
// rules they rely on.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "gdmd/error.hpp"

namespace gdmd {

using cdouble = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Truncated singular value decomposition M ~= U diag(S) V^*.
template <typename Scalar>
struct Svd {
  DenseMatrix<Scalar> U;
  RVector S;
  DenseMatrix<Scalar> V;

  Eigen::Index rank() const { return S.size(); }
};

struct Eig {
  CVector values;
  CMatrix vectors;  // unit-norm columns, aligned with values
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.size() == 0) throw ContractViolation(std::string(what) + ": empty matrix");
  if (!m.allFinite()) throw ContractViolation(std::string(what) + ": non-finite entry");
}

/// Smallest rank whose discarded tail has Frobenius norm <= budget. Values at
/// or below the numerical-rank floor are never kept.
inline Eigen::Index tail_rank(const RVector& s, double budget, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::Index n = s.size();
  if (n == 0 || s(0) <= 0.0) return 0;
  const double floor = static_cast<double>(std::max(rows, cols)) *
                       std::numeric_limits<double>::epsilon() * s(0);
  Eigen::Index numeric = 0;
  while (numeric < n && s(numeric) > floor) ++numeric;

  // tail[k] = ||s(k:)||
  std::vector<double> tail(n + 1, 0.0);
  for (Eigen::Index k = n - 1; k >= 0; --k) tail[k] = std::hypot(tail[k + 1], s(k));
  Eigen::Index r = 1;
  while (r < numeric && tail[r] > budget) ++r;
  return std::min(std::max<Eigen::Index>(r, 1), std::max<Eigen::Index>(numeric, 1));
}

}  // namespace detail

/// SVD truncated so that the discarded tail has Frobenius norm at most
/// `abs_budget`. At least one singular triplet is kept for nonzero input.
template <typename Derived>
Svd<typename Derived::Scalar> svd_abs(const Eigen::MatrixBase<Derived>& m, double abs_budget) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m, "svd");
  if (abs_budget < 0.0) throw ContractViolation("svd: negative tolerance");
  Eigen::JacobiSVD<DenseMatrix<Scalar>> solver(m.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = solver.singularValues();
  if (s.size() == 0 || s(0) == 0.0) throw DegenerateInput("svd: all-zero input has rank 0");
  const Eigen::Index r = detail::tail_rank(s, abs_budget, m.rows(), m.cols());
  return {solver.matrixU().leftCols(r), s.head(r), solver.matrixV().leftCols(r)};
}

/// SVD truncated to relative Frobenius error `tol` (tol = 0 keeps the
/// numerical rank).
template <typename Derived>
Svd<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m, double tol = 0.0) {
  detail::require_finite(m, "svd");
  if (tol < 0.0) throw ContractViolation("svd: negative tolerance");
  return svd_abs(m, tol * m.norm());
}

namespace detail {

inline void sort_spectrum(CVector& values, CMatrix& vectors) {
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(values(a)), mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    if (values(a).imag() != values(b).imag()) return values(a).imag() > values(b).imag();
    return values(a).real() > values(b).real();
  });
  CVector v(values.size());
  CMatrix w(vectors.rows(), vectors.cols());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    v(k) = values(order[k]);
    w.col(k) = vectors.col(order[k]);
    const double nrm = w.col(k).norm();
    if (nrm > 0.0) w.col(k) /= nrm;
  }
  values = std::move(v);
  vectors = std::move(w);
}

}  // namespace detail

/// Eigendecomposition of a general square matrix. Real input goes through the
/// real Schur path so the spectrum (and the eigenvectors) come out in exact
/// conjugate pairs. Ordered by decreasing modulus, then decreasing Im.
inline Eig eig_real(const RMatrix& m) {
  detail::require_finite(m, "eig");
  if (m.rows() != m.cols()) throw ContractViolation("eig: matrix is not square");
  Eigen::EigenSolver<RMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) throw Error("eig: QR iteration did not converge");
  Eig out{solver.eigenvalues(), solver.eigenvectors()};
  detail::sort_spectrum(out.values, out.vectors);
  return out;
}

inline Eig eig_complex(const CMatrix& m) {
  detail::require_finite(m, "eig");
  if (m.rows() != m.cols()) throw ContractViolation("eig: matrix is not square");
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) return eig_real(RMatrix(m.real()));
  Eigen::ComplexEigenSolver<CMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) throw Error("eig: QR iteration did not converge");
  Eig out{solver.eigenvalues(), solver.eigenvectors()};
  detail::sort_spectrum(out.values, out.vectors);
  return out;
}

template <typename Derived>
Eig eig(const Eigen::MatrixBase<Derived>& m) {
  if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
    return eig_complex(m.template cast<cdouble>());
  } else {
    return eig_real(m.template cast<double>());
  }
}

inline constexpr double kDefaultPinvTol = 1e-12;

/// Moore-Penrose pseudo-inverse; singular values below tol * sigma_max are
/// treated as zero.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> pinv(const Eigen::MatrixBase<Derived>& m,
                                           double tol = kDefaultPinvTol) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m, "pinv");
  if (tol < 0.0) throw ContractViolation("pinv: negative tolerance");
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<DenseMatrix<Scalar>> solver(m.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = solver.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return out;
  const double cut = tol * s(0);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) <= cut || s(k) == 0.0) break;
    out.noalias() += solver.matrixV().col(k) * (1.0 / s(k)) * solver.matrixU().col(k).adjoint();
  }
  return out;
}

}  // namespace gdmd

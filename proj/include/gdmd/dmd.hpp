#pragma once

// Exact DMD on snapshot matrices and the spectral helpers shared with Graph
// DMD (amplitudes, reconstruction, continuous-time conversion).

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "gdmd/numerics.hpp"

namespace gdmd {

/// Eigenvalues below this modulus are dropped: the mode formula divides by lambda.
inline constexpr double kZeroEigenvalue = 1e-14;
inline constexpr double kDefaultDmdTol = 1e-10;

struct SpectralResult {
  CVector eigenvalues;  // lambda_j
  CMatrix modes;        // column j is psi_j (or vec(Z_j))
  CVector amplitudes;   // b_{j,0}
  double dt = 1.0;      // seconds per frame
  std::vector<std::string> warnings;

  Eigen::Index size() const { return eigenvalues.size(); }
};

struct ContinuousRate {
  double freq_hz = 0.0;
  double growth_per_s = 0.0;
};

/// b = pinv([psi_1 ... psi_p]) y0.
inline CVector amplitudes(const CMatrix& modes, const CVector& y0) {
  if (modes.cols() < 1) throw ContractViolation("amplitudes: no modes");
  if (modes.rows() != y0.size()) throw ContractViolation("amplitudes: mode length does not match y0");
  return pinv(modes) * y0;
}

/// sum_j psi_j lambda_j^t b_j over the modes in `subset` (all when empty).
inline CVector reconstruct(const SpectralResult& result, double t, const std::vector<Eigen::Index>& subset = {}) {
  if (t < 0.0) throw ContractViolation("reconstruct: negative time index");
  CVector out = CVector::Zero(result.modes.rows());
  auto add = [&](Eigen::Index j) {
    out += result.modes.col(j) * (std::pow(result.eigenvalues(j), t) * result.amplitudes(j));
  };
  if (subset.empty()) {
    for (Eigen::Index j = 0; j < result.size(); ++j) add(j);
  } else {
    for (Eigen::Index j : subset) {
      if (j < 0 || j >= result.size()) throw ContractViolation("reconstruct: mode index out of range");
      add(j);
    }
  }
  return out;
}

/// Frequency |Im Log lambda| / (2 pi dt) and growth Re Log lambda / dt.
inline ContinuousRate to_continuous(cdouble lambda, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("to_continuous: dt must be positive");
  if (std::abs(lambda) == 0.0) throw ContractViolation("to_continuous: frequency undefined for lambda = 0");
  const cdouble log_lambda = std::log(lambda);
  return {std::abs(log_lambda.imag()) / (2.0 * std::numbers::pi * dt), log_lambda.real() / dt};
}

namespace detail {

/// Common tail of exact DMD and Graph DMD: eigendecompose the reduced operator
/// F and lift eigenvectors through `lift` (psi_j = lift w_j / lambda_j).
inline SpectralResult spectral_from_operator(const CMatrix& reduced, const CMatrix& lift, const CVector& y0, double dt) {
  const Eig e = eig(reduced);
  SpectralResult out;
  out.dt = dt;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < e.values.size(); ++j) {
    if (std::abs(e.values(j)) < kZeroEigenvalue) {
      out.warnings.push_back("dropped mode with |lambda| < 1e-14");
      continue;
    }
    keep.push_back(j);
  }
  if (keep.empty()) throw EmptySpectrum("every eigenvalue fell below the zero threshold");
  out.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  out.modes.resize(lift.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.eigenvalues(kk) = e.values(keep[k]);
    out.modes.col(kk) = lift * e.vectors.col(keep[k]) / e.values(keep[k]);
  }
  out.amplitudes = amplitudes(out.modes, y0);
  return out;
}

}  // namespace detail

/// Exact DMD of snapshots y_0..y_tau (one per column).
template <typename Derived>
SpectralResult exact_dmd(const Eigen::MatrixBase<Derived>& snapshots, double svd_tol = kDefaultDmdTol, double dt = 1.0) {
  using Scalar = typename Derived::Scalar;
  if (snapshots.cols() < 3) throw ContractViolation("exact_dmd: need at least 3 snapshots");
  if (!(dt > 0.0)) throw ContractViolation("exact_dmd: dt must be positive");
  detail::require_finite(snapshots, "exact_dmd");
  const Eigen::Index tau = snapshots.cols() - 1;
  const DenseMatrix<Scalar> x = snapshots.leftCols(tau);
  const DenseMatrix<Scalar> y = snapshots.rightCols(tau);
  const auto s = svd(x, svd_tol);
  const RVector inv_s = s.S.cwiseInverse();
  const DenseMatrix<Scalar> yv = y * s.V * inv_s.asDiagonal();
  const DenseMatrix<Scalar> reduced = s.U.adjoint() * yv;
  return detail::spectral_from_operator(reduced.template cast<cdouble>(), yv.template cast<cdouble>(),
                                        snapshots.col(0).template cast<cdouble>(), dt);
}

}  // namespace gdmd

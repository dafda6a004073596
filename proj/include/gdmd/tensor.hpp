#pragma once

// Order-3 tensors and their tensor-train decomposition.
//
// Storage is column-major over (i, j, t): entry (i, j, t) lives at
// i + n1 * (j + n2 * t). With that layout both unfoldings used here are free
// reshapes of the same buffer:
//   first unfolding   n1 x (n2 n3)     column index j + n2 t
//   unfold12          (n1 n2) x n3     row index i + n1 j  (vec of each slice)

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gdmd/numerics.hpp"

namespace gdmd {

class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3, double fill = 0.0)
      : dims_{n1, n2, n3} {
    if (n1 < 1 || n2 < 1 || n3 < 1) throw ContractViolation("Tensor3: every dimension must be >= 1");
    data_.assign(static_cast<std::size_t>(n1 * n2 * n3), fill);
  }

  /// Build from an (n1 n2) x n3 matrix whose columns are vec(slice_t).
  static Tensor3 from_unfold12(const RMatrix& unfolded, Eigen::Index n1, Eigen::Index n2) {
    if (unfolded.rows() != n1 * n2) throw ContractViolation("Tensor3: unfolding row count mismatch");
    Tensor3 t(n1, n2, unfolded.cols());
    Eigen::Map<RMatrix>(t.data_.data(), n1 * n2, unfolded.cols()) = unfolded;
    return t;
  }

  const std::array<Eigen::Index, 3>& dims() const { return dims_; }
  Eigen::Index n1() const { return dims_[0]; }
  Eigen::Index n2() const { return dims_[1]; }
  Eigen::Index n3() const { return dims_[2]; }

  double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index t) { return data_[index(i, j, t)]; }
  double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index t) const { return data_[index(i, j, t)]; }

  Eigen::Map<const RMatrix> unfold12() const { return {data_.data(), dims_[0] * dims_[1], dims_[2]}; }
  Eigen::Map<const RMatrix> unfold1() const { return {data_.data(), dims_[0], dims_[1] * dims_[2]}; }

  /// Slice t as an n1 x n2 matrix.
  Eigen::Map<const RMatrix> slice(Eigen::Index t) const {
    return {data_.data() + t * dims_[0] * dims_[1], dims_[0], dims_[1]};
  }
  Eigen::Map<RMatrix> slice(Eigen::Index t) { return {data_.data() + t * dims_[0] * dims_[1], dims_[0], dims_[1]}; }

  /// Frames [first, first + count) along the third axis.
  Tensor3 frames(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 1 || first + count > dims_[2]) throw ContractViolation("Tensor3: frame range out of bounds");
    Tensor3 out(dims_[0], dims_[1], count);
    const std::size_t stride = static_cast<std::size_t>(dims_[0] * dims_[1]);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * stride),
              data_.begin() + static_cast<std::ptrdiff_t>((first + count) * stride), out.data_.begin());
    return out;
  }

  double norm() const { return unfold12().norm(); }
  bool all_finite() const { return unfold12().allFinite(); }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(Eigen::Index i, Eigen::Index j, Eigen::Index t) const {
    return static_cast<std::size_t>(i + dims_[0] * (j + dims_[1] * t));
  }

  std::array<Eigen::Index, 3> dims_{0, 0, 0};
  std::vector<double> data_;
};

/// Tensor-train cores of an order-3 tensor, stored as their natural unfoldings:
///   g1: n1 x r1          (core 1 x n1 x r1)
///   g2: (r1 n2) x r2     (core r1 x n2 x r2, row alpha + r1 j)
///   g3: r2 x n3          (core r2 x n3 x 1)
/// Also keeps the singular values of the second sweep step so the DMD factors
/// can be read off without recomputation.
struct TTCores {
  RMatrix g1;
  RMatrix g2;
  RMatrix g3;
  RVector sigma2;
  RMatrix n2_factor;  // r2 x n3, orthonormal rows; g3 = diag(sigma2) n2_factor
  Eigen::Index n2 = 0;
  double epsilon = 0.0;

  Eigen::Index r1() const { return g1.cols(); }
  Eigen::Index r2() const { return g2.cols(); }
};

/// Left-to-right TT-SVD sweep. Each of the two truncating SVDs may discard a
/// tail of norm eps ||T||_F / sqrt(2), which bounds the total error by
/// eps ||T||_F.
inline TTCores tt_svd(const Tensor3& tensor, double epsilon) {
  if (epsilon < 0.0) throw ContractViolation("tt_svd: epsilon must be nonnegative");
  if (!tensor.all_finite()) throw ContractViolation("tt_svd: non-finite entry");
  const double total = tensor.norm();
  if (total == 0.0) throw DegenerateInput("tt_svd: zero tensor");
  const double delta = epsilon * total / std::sqrt(2.0);
  const Eigen::Index n1 = tensor.n1(), n2 = tensor.n2(), n3 = tensor.n3();

  auto first = svd_abs(tensor.unfold1(), delta);
  const Eigen::Index r1 = first.rank();
  // remainder diag(S1) V1^T is r1 x (n2 n3); its column-major buffer is the
  // (r1 n2) x n3 unfolding of the next core.
  RMatrix rest = first.S.asDiagonal() * first.V.transpose();
  Eigen::Map<const RMatrix> rest2(rest.data(), r1 * n2, n3);

  auto second = svd_abs(rest2, delta);
  TTCores cores;
  cores.g1 = std::move(first.U);
  cores.g2 = std::move(second.U);
  cores.sigma2 = second.S;
  cores.n2_factor = second.V.transpose();
  cores.g3 = second.S.asDiagonal() * cores.n2_factor;
  cores.n2 = n2;
  cores.epsilon = epsilon;
  return cores;
}

namespace detail {

/// Contract g1 with g2 into the (n1 n2) x r2 matrix with row i + n1 j.
inline RMatrix contract_left(const RMatrix& g1, const RMatrix& g2, Eigen::Index n2) {
  const Eigen::Index n1 = g1.rows(), r1 = g1.cols(), r2 = g2.cols();
  if (g2.rows() != r1 * n2) throw ContractViolation("tt: core 2 does not match core 1 rank");
  RMatrix out(n1 * n2, r2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    out.middleRows(j * n1, n1).noalias() = g1 * g2.middleRows(j * r1, r1);
  }
  return out;
}

}  // namespace detail

inline Tensor3 tt_reconstruct(const TTCores& cores) {
  if (cores.n2 < 1) throw ContractViolation("tt_reconstruct: missing middle dimension");
  if (cores.g3.rows() != cores.g2.cols()) throw ContractViolation("tt_reconstruct: core 3 does not match core 2 rank");
  const RMatrix left = detail::contract_left(cores.g1, cores.g2, cores.n2);
  return Tensor3::from_unfold12(left * cores.g3, cores.g1.rows(), cores.n2);
}

/// Matricized TT factors unfold12(T) ~= M Sigma N.
struct DmdFactors {
  RMatrix M;      // (n1 n2) x r2, orthonormal columns
  RVector sigma;  // r2, strictly positive, descending
  RMatrix N;      // r2 x n3

  RMatrix Sigma() const { return sigma.asDiagonal(); }
};

inline DmdFactors dmd_factors(const TTCores& cores) {
  return {detail::contract_left(cores.g1, cores.g2, cores.n2), cores.sigma2, cores.n2_factor};
}

inline DmdFactors dmd_factors(const Tensor3& tensor, double epsilon) { return dmd_factors(tt_svd(tensor, epsilon)); }

}  // namespace gdmd

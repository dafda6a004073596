#pragma once

// Graph DMD: DMD on a sequence of adjacency matrices using tensor-train
// factors of the snapshot tensors in place of an SVD, producing matrix-shaped
// modes Z_j with time dynamics lambda_j^t b_j.

#include <cmath>
#include <optional>
#include <vector>

#include "gdmd/dmd.hpp"
#include "gdmd/series.hpp"
#include "gdmd/tensor.hpp"

namespace gdmd {

inline constexpr double kDefaultEpsilon = 1e-5;

struct GraphDmdResult {
  SpectralResult base;               // column j of base.modes is vec(Z_j)
  std::vector<CMatrix> modes_matrix;  // Z_j, m x m
  Eigen::Index m = 0;
  std::vector<double> vaf;  // per mode; conjugate pairs share a value
  Eigen::Index frames = 0;  // length of the decomposed series

  Eigen::Index size() const { return base.size(); }
};

/// Column-major matricization, the inverse of the vec used by unfold12.
inline CMatrix matricize(const CVector& z, Eigen::Index m) {
  if (z.size() != m * m) throw ContractViolation("matricize: length is not m^2");
  return Eigen::Map<const CMatrix>(z.data(), m, m);
}

/// Index of the conjugate partner of mode j, if lambda_j is complex and a
/// partner exists.
inline std::optional<Eigen::Index> conjugate_partner(const CVector& lambdas, Eigen::Index j) {
  const cdouble lj = lambdas(j);
  const double scale = std::max(1.0, std::abs(lj));
  if (std::abs(lj.imag()) <= 1e-12 * scale) return std::nullopt;
  std::optional<Eigen::Index> best;
  double best_dist = 1e-8 * scale;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    if (k == j) continue;
    const double d = std::abs(lambdas(k) - std::conj(lj));
    if (d <= best_dist) {
      best = k;
      best_dist = d;
    }
  }
  return best;
}

/// Re(sum_{j in subset} Z_j lambda_j^t b_j); all modes when subset is empty.
inline RMatrix gdmd_reconstruct(const GraphDmdResult& result, double t, const std::vector<Eigen::Index>& subset = {}) {
  return matricize(reconstruct(result.base, t, subset), result.m).real();
}

/// Mean element-wise absolute reconstruction error over every frame.
inline double mean_abs_reconstruction_error(const AdjacencySeries& series, const GraphDmdResult& result) {
  double acc = 0.0;
  for (Eigen::Index t = 0; t < series.frames(); ++t) {
    acc += (series.tensor.slice(t) - gdmd_reconstruct(result, static_cast<double>(t))).cwiseAbs().sum();
  }
  return acc / static_cast<double>(series.m() * series.m() * series.frames());
}

/// VAF_j = 1 - ||A - A_j||_F^2 / ||A||_F^2 where A_j reconstructs every frame
/// from mode j alone (together with its conjugate partner when complex).
inline double vaf(const AdjacencySeries& series, const GraphDmdResult& result, Eigen::Index j) {
  if (j < 0 || j >= result.size()) throw ContractViolation("vaf: mode index out of range");
  const double total = series.tensor.norm();
  if (total == 0.0) throw DegenerateInput("vaf: zero-norm series");
  std::vector<Eigen::Index> group{j};
  if (auto k = conjugate_partner(result.base.eigenvalues, j)) group.push_back(*k);

  const auto data = series.tensor.unfold12();
  double residual = 0.0;
  for (Eigen::Index t = 0; t < series.frames(); ++t) {
    RVector approx = RVector::Zero(data.rows());
    for (Eigen::Index g : group) {
      const cdouble c = std::pow(result.base.eigenvalues(g), static_cast<double>(t)) * result.base.amplitudes(g);
      approx += (result.base.modes.col(g) * c).real();
    }
    residual += (data.col(t) - approx).squaredNorm();
  }
  return 1.0 - residual / (total * total);
}

/// Wrap a spectrum whose modes are vec(Z_j) into a GraphDmdResult: matricize
/// the modes and score every mode's VAF against `series`.
inline GraphDmdResult attach_modes(const AdjacencySeries& series, SpectralResult spectrum) {
  GraphDmdResult out;
  out.m = series.m();
  out.frames = series.frames();
  out.base = std::move(spectrum);
  for (Eigen::Index j = 0; j < out.base.size(); ++j) out.modes_matrix.push_back(matricize(out.base.modes.col(j), out.m));
  out.vaf.resize(static_cast<std::size_t>(out.base.size()));
  for (Eigen::Index j = 0; j < out.base.size(); ++j) out.vaf[static_cast<std::size_t>(j)] = vaf(series, out, j);
  return out;
}

/// Graph DMD of an adjacency series with tau + 1 frames.
///
/// X = frames 0..tau-1 and Y = frames 1..tau are each factored by TT-SVD into
/// M Sigma N and P (Sigma_Y N_Y); Q = Sigma_Y N_Y absorbs the singular values
/// of Y so that P Q ~= unfold12(Y). Then
///   F = (M^* P)(Q N^+) Sigma^-1,   z_j = P Q N^+ Sigma^-1 w_j / lambda_j.
inline GraphDmdResult graph_dmd(const AdjacencySeries& series, double epsilon = kDefaultEpsilon) {
  if (series.frames() < 3) throw ContractViolation("graph_dmd: need at least 3 frames");
  if (!(epsilon > 0.0)) throw ContractViolation("graph_dmd: epsilon must be positive");
  const Eigen::Index tau = series.frames() - 1;
  const DmdFactors fx = dmd_factors(series.tensor.frames(0, tau), epsilon);
  const DmdFactors fy = dmd_factors(series.tensor.frames(1, tau), epsilon);

  const RMatrix q = fy.sigma.asDiagonal() * fy.N;
  const RMatrix lift = fy.M * (q * pinv(fx.N)) * fx.sigma.cwiseInverse().asDiagonal();
  const RMatrix reduced = fx.M.transpose() * lift;
  const CVector a0 = series.tensor.unfold12().col(0).cast<cdouble>();
  SpectralResult spectrum = detail::spectral_from_operator(reduced.cast<cdouble>(), lift.cast<cdouble>(), a0, series.dt());
  return attach_modes(series, std::move(spectrum));
}

/// Largest VAF over all modes.
inline double max_vaf(const GraphDmdResult& result) {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : result.vaf) best = std::max(best, v);
  return best;
}

}  // namespace gdmd

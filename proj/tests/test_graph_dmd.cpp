#include <gtest/gtest.h>

#include <numbers>
#include <numeric>

#include "gdmd/graph_dmd.hpp"
#include "oracles.hpp"

using namespace gdmd;
using namespace gdmd::testing;

namespace {

constexpr double kFps = 25.0;

// A travelling oscillation: `in_phase` follows cos, `quadrature` follows sin.
// A lone standing pattern (quadrature = 0) spans only one spatial direction,
// which no DMD variant can turn into an oscillating mode pair.
struct Wave {
  RMatrix in_phase;
  RMatrix quadrature;
  double freq_hz;
  double phase;
};

AdjacencySeries wave_series(const RMatrix& base, const std::vector<Wave>& waves, int frames) {
  const auto m = base.rows();
  Tensor3 t(m, m, frames);
  for (int k = 0; k < frames; ++k) {
    RMatrix a = base;
    for (const auto& w : waves) {
      const double arg = 2 * std::numbers::pi * w.freq_hz * k / kFps + w.phase;
      a += std::cos(arg) * w.in_phase + std::sin(arg) * w.quadrature;
    }
    t.slice(k) = a;
  }
  return make_series(std::move(t), kFps);
}

RMatrix symmetric_edge(Eigen::Index m, Eigen::Index i, Eigen::Index j, double v) {
  RMatrix b = RMatrix::Zero(m, m);
  b(i, j) = b(j, i) = v;
  return b;
}

RMatrix baseline(Eigen::Index m) {
  RMatrix c = RMatrix::Constant(m, m, 0.5);
  c.diagonal().setOnes();
  return c;
}

/// Bin-peak frequency of a real signal by direct DFT over the non-negative bins.
double dft_peak(const std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> centred(x.size());
  std::transform(x.begin(), x.end(), centred.begin(), [&](double v) { return v - mean; });
  const std::size_t n = x.size();
  double best_f = 0.0, best = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * kFps / static_cast<double>(n);
    const double mag = dft_magnitude(centred, kFps, f);
    if (mag > best) {
      best = mag;
      best_f = f;
    }
  }
  return best_f;
}

std::vector<double> edge_series(const AdjacencySeries& s, Eigen::Index i, Eigen::Index j) {
  std::vector<double> out;
  for (Eigen::Index t = 0; t < s.frames(); ++t) out.push_back(s.tensor(i, j, t));
  return out;
}

/// Index of the mode with positive imaginary part closest to `freq_hz`.
Eigen::Index mode_near(const GraphDmdResult& r, double freq_hz) {
  Eigen::Index best = -1;
  double gap = 1e9;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const auto c = to_continuous(r.base.eigenvalues(j), r.base.dt);
    if (r.base.eigenvalues(j).imag() > 0 && std::abs(c.freq_hz - freq_hz) < gap) {
      gap = std::abs(c.freq_hz - freq_hz);
      best = j;
    }
  }
  return best;
}

}  // namespace

TEST(GraphDmd, StaticGraph) {
  const AdjacencySeries s = wave_series(baseline(4), {}, 20);
  const auto r = graph_dmd(s);
  ASSERT_GE(r.size(), 1);
  EXPECT_NEAR(std::abs(r.base.eigenvalues(0) - 1.0), 0.0, 1e-10);
  const CMatrix& z = r.modes_matrix[0];
  const RMatrix a0 = s.tensor.slice(0);
  // Z proportional to A0
  const cdouble scale = z(0, 0) / a0(0, 0);
  EXPECT_LE((z - scale * a0.cast<cdouble>()).norm(), 1e-10 * z.norm());
  EXPECT_NEAR(r.vaf[0], 1.0, 1e-10);
  EXPECT_EQ(r.modes_matrix.size(), static_cast<std::size_t>(r.size()));
  EXPECT_LE((Eigen::Map<const CVector>(z.data(), 16) - r.base.modes.col(0)).norm(), 0.0);
}

TEST(GraphDmd, SingleCosineFrequencyAndLocalization) {
  const auto b = symmetric_edge(5, 1, 3, 0.3);
  const auto bq = symmetric_edge(5, 1, 2, 0.2);
  const AdjacencySeries s = wave_series(baseline(5), {{b, bq, 1.0, 0.4}}, 250);
  const auto r = graph_dmd(s);
  const double oracle = dft_peak(edge_series(s, 1, 3));
  EXPECT_NEAR(oracle, 1.0, 1e-12);
  const Eigen::Index j = mode_near(r, oracle);
  ASSERT_GE(j, 0);
  EXPECT_NEAR(to_continuous(r.base.eigenvalues(j), r.base.dt).freq_hz, 1.0, 0.02);
  EXPECT_NEAR(std::abs(r.base.eigenvalues(j)), 1.0, 0.01);
  const RMatrix mag = r.modes_matrix[static_cast<std::size_t>(j)].cwiseAbs();
  const double peak = mag.maxCoeff();
  EXPECT_NEAR(mag(1, 3), peak, 1e-9);
  EXPECT_NEAR(mag(3, 1), peak, 1e-9);
  // amplitude ratio of the two planted edges is 0.3 : 0.2
  EXPECT_NEAR(mag(1, 2) / mag(1, 3), 2.0 / 3.0, 1e-8);
  RMatrix off = mag;
  off(1, 3) = off(3, 1) = off(1, 2) = off(2, 1) = 0.0;
  EXPECT_LE(off.maxCoeff(), 1e-6 * peak);
}

TEST(GraphDmd, TwoCosinesOnDisjointSupports) {
  // support 1: edges (0,1), (0,2); support 2: edges (3,4), (2,3)
  const RMatrix s1 = symmetric_edge(5, 0, 1, 0.2) + symmetric_edge(5, 0, 2, 0.2);
  const RMatrix s2 = symmetric_edge(5, 3, 4, 0.25) + symmetric_edge(5, 2, 3, 0.25);
  const AdjacencySeries s = wave_series(
      baseline(5),
      {{symmetric_edge(5, 0, 1, 0.2), symmetric_edge(5, 0, 2, 0.2), 0.5, 0.0},
       {symmetric_edge(5, 3, 4, 0.25), symmetric_edge(5, 2, 3, 0.25), 1.5, 1.0}},
      250);
  const auto r = graph_dmd(s);
  struct Case {
    int i, j;
    double f;
    RMatrix own, other;
  };
  for (const auto& c : std::vector<Case>{{0, 1, 0.5, s1, s2}, {3, 4, 1.5, s2, s1}}) {
    const double oracle = dft_peak(edge_series(s, c.i, c.j));
    EXPECT_NEAR(oracle, c.f, 1e-12);
    const Eigen::Index j = mode_near(r, oracle);
    ASSERT_GE(j, 0);
    EXPECT_NEAR(to_continuous(r.base.eigenvalues(j), r.base.dt).freq_hz, c.f, 0.02);
    const RMatrix mag = r.modes_matrix[static_cast<std::size_t>(j)].cwiseAbs();
    const double peak = mag.maxCoeff();
    const double on_own = (mag.array() * (c.own.array() != 0).cast<double>()).maxCoeff();
    const double leak = (mag.array() * (c.other.array() != 0).cast<double>()).maxCoeff();
    EXPECT_NEAR(on_own, peak, 1e-12);
    EXPECT_LE(leak, 0.1 * peak);
  }
}

TEST(GraphDmd, ConjugateModesAreConjugateAndSymmetric) {
  const AdjacencySeries s = wave_series(
      baseline(4),
      {{symmetric_edge(4, 0, 2, 0.2), symmetric_edge(4, 0, 1, 0.1), 0.7, 0.0},
       {symmetric_edge(4, 1, 3, 0.2), symmetric_edge(4, 2, 3, 0.15), 1.9, 0.5}},
      120);
  const auto r = graph_dmd(s);
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const CMatrix& z = r.modes_matrix[static_cast<std::size_t>(j)];
    EXPECT_LE((z - z.transpose()).cwiseAbs().maxCoeff(), 1e-6);
    if (auto k = conjugate_partner(r.base.eigenvalues, j)) {
      EXPECT_LE((r.modes_matrix[static_cast<std::size_t>(*k)] - z.conjugate()).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_DOUBLE_EQ(r.vaf[static_cast<std::size_t>(j)], r.vaf[static_cast<std::size_t>(*k)]);
    }
  }
}

TEST(GdmdReconstruct, InitialFrameAndStaticSubset) {
  const auto b = symmetric_edge(5, 1, 3, 0.3);
  const auto bq = symmetric_edge(5, 1, 2, 0.2);
  const AdjacencySeries s = wave_series(baseline(5), {{b, bq, 1.0, 0.4}}, 250);
  const auto r = graph_dmd(s);
  EXPECT_LE((gdmd_reconstruct(r, 0) - s.tensor.slice(0)).cwiseAbs().maxCoeff(), 1e-8);

  Eigen::Index unit = -1;
  for (Eigen::Index j = 0; j < r.size(); ++j)
    if (std::abs(r.base.eigenvalues(j) - 1.0) < 1e-8) unit = j;
  ASSERT_GE(unit, 0);
  EXPECT_LE((gdmd_reconstruct(r, 0, {unit}) - gdmd_reconstruct(r, 123, {unit})).norm(), 1e-9);

  double worst = 0.0;
  for (Eigen::Index t = 0; t < s.frames(); ++t)
    worst = std::max(worst, (gdmd_reconstruct(r, static_cast<double>(t)) - s.tensor.slice(t)).cwiseAbs().maxCoeff());
  EXPECT_LE(worst, 0.05);
}

TEST(Vaf, SingleModeDataIsFullyExplained) {
  // A_t = 0.95^t * C: a single real mode.
  const RMatrix c = baseline(4);
  Tensor3 t(4, 4, 30);
  for (int k = 0; k < 30; ++k) t.slice(k) = std::pow(0.95, k) * c;
  const AdjacencySeries s = make_series(std::move(t), kFps);
  const auto r = graph_dmd(s, 1e-8);
  ASSERT_EQ(r.size(), 1);
  EXPECT_NEAR(r.base.eigenvalues(0).real(), 0.95, 1e-10);
  EXPECT_NEAR(vaf(s, r, 0), 1.0, 1e-7);
}

TEST(Vaf, ZeroAmplitudeModeScoresZero) {
  const AdjacencySeries s = wave_series(baseline(3), {}, 10);
  auto r = graph_dmd(s);
  r.base.amplitudes(0) = 0.0;
  EXPECT_NEAR(vaf(s, r, 0), 0.0, 1e-12);
}

TEST(Vaf, StaticModeOfCosinePlusConstant) {
  const RMatrix c = baseline(5);
  const auto b = symmetric_edge(5, 1, 3, 0.3);
  const auto bq = symmetric_edge(5, 1, 2, 0.2);
  const double phase = 0.4;
  const AdjacencySeries s = wave_series(c, {{b, bq, 1.0, phase}}, 250);
  const auto r = graph_dmd(s);
  Eigen::Index unit = -1;
  for (Eigen::Index j = 0; j < r.size(); ++j)
    if (std::abs(r.base.eigenvalues(j) - 1.0) < 1e-8) unit = j;
  ASSERT_GE(unit, 0);
  // Analytic energy split from the generator.
  double cos_energy = 0.0;
  for (int k = 0; k < 250; ++k) {
    const double arg = 2 * std::numbers::pi * k / kFps + phase;
    cos_energy += (std::cos(arg) * b + std::sin(arg) * bq).squaredNorm();
  }
  const double total = s.tensor.norm();
  EXPECT_NEAR(r.vaf[static_cast<std::size_t>(unit)], 1.0 - cos_energy / (total * total), 1e-8);
}

TEST(Vaf, ZeroSeriesRejected) {
  const AdjacencySeries s = wave_series(baseline(3), {}, 10);
  const auto r = graph_dmd(s);
  const AdjacencySeries zero = make_series(Tensor3(3, 3, 10), kFps);
  EXPECT_THROW(vaf(zero, r, 0), DegenerateInput);
}

TEST(GraphDmd, RejectsDegenerateInputs) {
  EXPECT_THROW(graph_dmd(make_series(Tensor3(3, 3, 10), kFps)), DegenerateInput);
  EXPECT_THROW(graph_dmd(wave_series(baseline(3), {}, 2)), ContractViolation);
  EXPECT_THROW(graph_dmd(wave_series(baseline(3), {}, 5), 0.0), ContractViolation);
}

TEST(GraphDmdProperty, AgreesWithExactDmdOnUnfolding) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + trial % 3;
    const int frames = 5 + trial % 8;
    Tensor3 t(m, m, frames);
    for (int k = 0; k < frames; ++k) {
      const RMatrix a = random_matrix(rng, m, m);
      t.slice(k) = a + a.transpose();
    }
    const AdjacencySeries s = make_series(std::move(t), kFps);
    const auto g = graph_dmd(s, 1e-12);
    const auto e = exact_dmd(s.tensor.unfold12(), 1e-12, s.dt());
    EXPECT_LE(multiset_distance(to_list(g.base.eigenvalues), to_list(e.eigenvalues)), 1e-6) << "trial " << trial;
  }
}

TEST(GraphDmdProperty, FullReconstructionOnLowRankData) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 10; ++trial) {
    const RMatrix c = baseline(4);
    const auto b = symmetric_edge(4, trial % 4, (trial + 1) % 4, 0.2);
    const auto bq = symmetric_edge(4, trial % 4, (trial + 2) % 4, 0.15);
    const AdjacencySeries s = wave_series(c, {{b, bq, 0.4 + 0.1 * trial, 0.3 * trial}}, 60);
    const double eps = 1e-5;
    const auto r = graph_dmd(s, eps);
    double err2 = 0.0;
    for (Eigen::Index k = 0; k < s.frames(); ++k)
      err2 += (gdmd_reconstruct(r, static_cast<double>(k)) - s.tensor.slice(k)).squaredNorm();
    EXPECT_LE(std::sqrt(err2) / s.tensor.norm(), 10 * eps + 1e-6);
  }
}

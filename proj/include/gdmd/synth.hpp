#pragma once

// Synthetic graph dynamical systems with known spectra, circular-orbit
// trajectory generators and a brute-force DFT oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gdmd/ingest.hpp"

namespace gdmd {

struct PlantedEdge {
  int i = 0, j = 0;
  double phase = 0.0;  // added to the component phase
};

struct OscillatorComponent {
  std::vector<PlantedEdge> edges;
  double freq_hz = 1.0;
  double amplitude = 0.1;
  double phase = 0.0;
};

struct OscillatorSpec {
  int m = 4;
  std::vector<OscillatorComponent> components;
  RMatrix baseline;  // m x m; empty means 0.5 off the diagonal
  double fps = 25.0;
  double duration_s = 10.0;
  double noise_sd = 0.01;

  Eigen::Index frames() const { return static_cast<Eigen::Index>(std::llround(duration_s * fps)); }
};

inline constexpr double kClampFloor = 1e-6;
inline constexpr double kMaxClampedFraction = 0.01;

/// Entries C + sum amp cos(2 pi f t / fps + phase) + noise, clamped to
/// [1e-6, 1]; symmetric with unit diagonal.
inline AdjacencySeries gen_adjacency(const OscillatorSpec& spec, std::uint64_t seed) {
  const int m = spec.m;
  if (m < 2) throw InfeasibleSpec("gen_adjacency: need m >= 2");
  if (!(spec.fps > 0.0) || spec.frames() < 1) throw InfeasibleSpec("gen_adjacency: need fps > 0 and at least one frame");
  if (spec.noise_sd < 0.0) throw InfeasibleSpec("gen_adjacency: negative noise sd");
  RMatrix c = spec.baseline.size() == 0 ? RMatrix::Constant(m, m, 0.5) : spec.baseline;
  if (c.rows() != m || c.cols() != m) throw InfeasibleSpec("gen_adjacency: baseline is not m x m");
  for (const auto& comp : spec.components) {
    if (!(comp.freq_hz >= 0.0) || comp.freq_hz >= spec.fps / 2.0) throw InfeasibleSpec("gen_adjacency: frequency must lie in [0, fps/2)");
    for (const auto& e : comp.edges)
      if (e.i < 0 || e.j < 0 || e.i >= m || e.j >= m || e.i == e.j) throw InfeasibleSpec("gen_adjacency: bad planted edge");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const Eigen::Index n = spec.frames();
  Tensor3 t(m, m, n);
  std::size_t clamped = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    RMatrix a = 0.5 * (c + c.transpose());
    for (const auto& comp : spec.components)
      for (const auto& e : comp.edges) {
        const double v = comp.amplitude * std::cos(2.0 * std::numbers::pi * comp.freq_hz * static_cast<double>(k) / spec.fps + comp.phase + e.phase);
        a(e.i, e.j) += v;
        a(e.j, e.i) += v;
      }
    for (int i = 0; i < m; ++i) {
      t(i, i, k) = 1.0;
      for (int j = i + 1; j < m; ++j) {
        double v = a(i, j) + (spec.noise_sd > 0.0 ? spec.noise_sd * noise(rng) : 0.0);
        if (v < kClampFloor || v > 1.0) {
          ++clamped;
          v = std::clamp(v, kClampFloor, 1.0);
        }
        t(i, j, k) = t(j, i, k) = v;
      }
    }
  }
  const double total = static_cast<double>(n) * m * (m - 1) / 2.0;
  if (static_cast<double>(clamped) > kMaxClampedFraction * total)
    throw InfeasibleSpec("gen_adjacency: " + std::to_string(clamped) + " of " + std::to_string(static_cast<long long>(total)) +
                         " samples left [1e-6, 1]; lower the amplitudes");
  return make_series(std::move(t), spec.fps);
}

struct FftPeak {
  double freq_hz = 0.0;
  double resolution_hz = 0.0;
};

/// Peak of the mean-removed DFT magnitude of edge (i, j), bins 1..n/2.
inline FftPeak fft_edge_oracle(const AdjacencySeries& series, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n = series.frames();
  if (static_cast<double>(n) < 2.0 * series.fps) throw ContractViolation("fft_edge_oracle: need at least 2 s of data");
  std::vector<double> x(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) mean += (x[static_cast<std::size_t>(k)] = series.tensor(i, j, k)) / static_cast<double>(n);
  double spread = 0.0;
  for (double& v : x) {
    v -= mean;
    spread = std::max(spread, std::abs(v));
  }
  if (spread <= 1e-12 * std::max(1.0, std::abs(mean))) throw DegenerateInput("fft_edge_oracle: flat series has no dominant frequency");
  Eigen::Index best = 1;
  double best_mag = -1.0;
  for (Eigen::Index b = 1; b <= n / 2; ++b) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      acc += x[static_cast<std::size_t>(k)] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(b * k % n) / static_cast<double>(n));
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best = b;
    }
  }
  const double res = series.fps / static_cast<double>(n);
  return {static_cast<double>(best) * res, res};
}

struct Orbit {
  int agent_id = 0;
  Role role = Role::generic;
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;
  double freq_hz = 0.0;  // negative turns clockwise
  double phase = 0.0;
};

struct OrbitConfig {
  std::string segment_id = "orbit";
  std::vector<Orbit> agents;
  double fps = 25.0;
  Eigen::Index frames = 100;
  double position_noise_m = 0.0;
};

/// Agent k at c_k + r_k (cos, sin)(2 pi f_k t / fps + phase_k).
inline Segment gen_trajectories(const OrbitConfig& cfg, std::uint64_t seed) {
  if (cfg.agents.empty() || cfg.frames < 1 || !(cfg.fps > 0.0)) throw InfeasibleSpec("gen_trajectories: empty orbit config");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Segment seg{cfg.segment_id, cfg.fps, {}};
  std::vector<Orbit> sorted = cfg.agents;
  std::sort(sorted.begin(), sorted.end(), [](const Orbit& a, const Orbit& b) { return a.agent_id < b.agent_id; });
  for (Eigen::Index k = 0; k < cfg.frames; ++k) {
    Frame f;
    for (const auto& o : sorted) {
      const double angle = 2.0 * std::numbers::pi * o.freq_hz * static_cast<double>(k) / cfg.fps + o.phase;
      double x = o.cx + o.radius * std::cos(angle);
      double y = o.cy + o.radius * std::sin(angle);
      if (cfg.position_noise_m > 0.0) {
        x += cfg.position_noise_m * noise(rng);
        y += cfg.position_noise_m * noise(rng);
      }
      f.agents.push_back({o.agent_id, o.role, x, y});
    }
    seg.frames.push_back(std::move(f));
  }
  return seg;
}

struct DatasetSpec {
  int n_per_class = 100;
  double planted_freq_hz = 0.5;
  double planted_radius_m = 1.2;  // orbit radius of the two defenders nearest the ball
  double jitter = 1.0;            // 0 gives identical segments within each class
  double fps = 25.0;
  Eigen::Index frames = 100;
  double position_noise_m = 0.02;
};

inline constexpr double kMaxPlantedRadius = 2.0;

struct LabeledSegments {
  std::vector<Segment> segments;
  std::vector<LabelRow> labels;
};

/// Half-court scene: ring at the origin, ball at the top of the key, each
/// defender between its attacker and the ring. D2 stands about 2.5 m from D1;
/// class 1 sends D2 round a 0.5 Hz orbit there so the D1-D2 weight swings
/// strongly, class 0 leaves it at the centre. Everyone else drifts slowly.
inline LabeledSegments gen_labeled_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  if (spec.n_per_class < 1) throw InfeasibleSpec("gen_labeled_dataset: n_per_class must be positive");
  if (!(spec.planted_radius_m > 0.0) || spec.planted_radius_m > kMaxPlantedRadius)
    throw InfeasibleSpec("gen_labeled_dataset: planted amplitude must lie in (0, " + std::to_string(kMaxPlantedRadius) +
                         "] m or the nearest-defender ordering breaks");
  if (spec.jitter < 0.0 || spec.jitter > 1.0) throw InfeasibleSpec("gen_labeled_dataset: jitter must lie in [0, 1]");
  if (!(spec.planted_freq_hz > 0.0) || spec.planted_freq_hz >= spec.fps / 2.0) throw InfeasibleSpec("gen_labeled_dataset: bad planted frequency");

  // A1..A5 then D1..D5, in ball-distance order
  static constexpr std::array<std::array<double, 2>, 10> base{{{-1.5, 7.8}, {6.0, 6.5}, {-6.0, 4.0}, {7.0, 0.6}, {-6.9, -0.6},
                                                               {0.0, 6.5}, {2.3, 5.5}, {-4.3, 2.9}, {6.0, 0.0}, {-5.0, -0.4}}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double j = spec.jitter;

  LabeledSegments out;
  int counter = 0;
  for (int cls : {0, 1}) {
    for (int s = 0; s < spec.n_per_class; ++s, ++counter) {
      OrbitConfig cfg;
      char id[32];
      std::snprintf(id, sizeof id, "seg%04d", counter);
      cfg.segment_id = id;
      cfg.fps = spec.fps;
      cfg.frames = spec.frames;
      cfg.position_noise_m = spec.position_noise_m;
      for (int k = 0; k < 10; ++k) {
        const auto& p = base[static_cast<std::size_t>(k)];
        Orbit o{k, k < 5 ? Role::attacker : Role::defender, p[0] + 0.3 * j * u(rng), p[1] + 0.3 * j * u(rng),
                0.075 * j * (1.0 + u(rng)), 0.15 + 0.1 * j * u(rng), angle(rng)};
        if (cls == 1 && k == 6) {
          o.radius = spec.planted_radius_m * (1.0 + 0.2 * j * u(rng));
          o.freq_hz = spec.planted_freq_hz * (u(rng) < 0.0 ? -1.0 : 1.0);
          if (j == 0.0) o.freq_hz = spec.planted_freq_hz;
        }
        cfg.agents.push_back(o);
      }
      cfg.agents.push_back({10, Role::ball, 0.3 * j * u(rng), 8.0 + 0.3 * j * u(rng), 0.0, 0.0, 0.0});
      cfg.agents.push_back({11, Role::ring, 0.0, 0.0, 0.0, 0.0, 0.0});
      out.segments.push_back(gen_trajectories(cfg, rng()));
      out.labels.push_back({cfg.segment_id, cls});
    }
  }
  return out;
}

}  // namespace gdmd

#pragma once

// Sliding-window decomposition of one segment and reduction of the resulting
// modes to a single symmetric m x m matrix.

#include <future>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gdmd/config.hpp"
#include "gdmd/graph_dmd.hpp"

namespace gdmd {

inline constexpr double kMinWindowVaf = 0.01;

enum class Decomposer { graph, exact };

struct WindowResult {
  Eigen::Index start = 0;
  GraphDmdResult result;
  double max_vaf = 0.0;
  bool valid = false;
  std::optional<RMatrix> matrix;  // post-processed; empty when nothing lies in band
};

struct WindowedModes {
  std::vector<WindowResult> windows;
  RMatrix averaged_mode;
  double band_hz = 0.0;

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (const auto& w : windows) n += w.valid ? 1 : 0;
    return n;
  }
};

inline std::vector<Eigen::Index> window_starts(Eigen::Index frames, Eigen::Index window, Eigen::Index overlap) {
  if (window < 1 || overlap < 0 || overlap >= window) throw ContractViolation("sliding_windows: need window > overlap >= 0");
  if (frames < window) throw InputError("series has " + std::to_string(frames) + " frames, shorter than one window of " + std::to_string(window));
  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + window <= frames; s += window - overlap) starts.push_back(s);
  return starts;
}

inline std::vector<AdjacencySeries> sliding_windows(const AdjacencySeries& series, Eigen::Index window, Eigen::Index overlap) {
  std::vector<AdjacencySeries> out;
  for (Eigen::Index s : window_starts(series.frames(), window, overlap)) out.push_back(series.window(s, window));
  return out;
}

/// Indices of modes with frequency <= cutoff, one per conjugate pair (Im >= 0).
inline std::vector<Eigen::Index> band_modes(const SpectralResult& s, double cutoff_hz) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const cdouble l = s.eigenvalues(j);
    if (l.imag() < 0.0 && conjugate_partner(s.eigenvalues, j)) continue;
    if (to_continuous(l, s.dt).freq_hz <= cutoff_hz) out.push_back(j);
  }
  return out;
}

/// Largest-VAF oscillating (Im > 0) mode within the band, if any.
inline std::optional<Eigen::Index> dominant_oscillation(const GraphDmdResult& r, double cutoff_hz) {
  std::optional<Eigen::Index> best;
  for (Eigen::Index j : band_modes(r.base, cutoff_hz)) {
    if (!(r.base.eigenvalues(j).imag() > 0.0)) continue;
    if (!best || r.vaf[static_cast<std::size_t>(j)] > r.vaf[static_cast<std::size_t>(*best)]) best = j;
  }
  return best;
}

namespace detail {

inline void normalize_max(RMatrix& a) {
  const double peak = a.maxCoeff();
  if (!(peak > 0.0)) throw DegenerateInput("mode matrix is identically zero");
  a /= peak;
}

}  // namespace detail

/// Band-select, |Z_j| scaled to max 1, average, symmetrize, scale to max 1.
inline RMatrix postprocess(const GraphDmdResult& result, double cutoff_hz) {
  const auto picked = band_modes(result.base, cutoff_hz);
  if (picked.empty()) throw EmptySpectrum("no modes within the 0.." + std::to_string(cutoff_hz) + " Hz band");
  RMatrix acc = RMatrix::Zero(result.m, result.m);
  for (Eigen::Index j : picked) {
    RMatrix a = result.modes_matrix[static_cast<std::size_t>(j)].cwiseAbs();
    detail::normalize_max(a);
    acc += a;
  }
  acc /= static_cast<double>(picked.size());
  RMatrix sym = 0.5 * (acc + acc.transpose());
  detail::normalize_max(sym);
  return sym;
}

/// Mean of the given window matrices, scaled to max 1.
inline RMatrix aggregate(const std::vector<RMatrix>& mats) {
  if (mats.empty()) throw DegenerateInput("aggregate: no valid windows");
  RMatrix acc = RMatrix::Zero(mats.front().rows(), mats.front().cols());
  for (const auto& a : mats) {
    if (a.rows() != acc.rows() || a.cols() != acc.cols()) throw ContractViolation("aggregate: matrix sizes differ");
    acc += a;
  }
  acc /= static_cast<double>(mats.size());
  RMatrix sym = 0.5 * (acc + acc.transpose());
  detail::normalize_max(sym);
  return sym;
}

inline GraphDmdResult decompose_window(const AdjacencySeries& w, double epsilon, Decomposer how) {
  if (how == Decomposer::graph) return graph_dmd(w, epsilon);
  return attach_modes(w, exact_dmd(w.tensor.unfold12(), epsilon, w.dt()));
}

/// Windows are independent; with jobs > 1 they run concurrently and are
/// collected back in start order.
inline WindowedModes decompose_segment(const AdjacencySeries& series, const Config& config,
                                       Decomposer how = Decomposer::graph, int jobs = 1) {
  const auto starts = window_starts(series.frames(), config.window, config.overlap);
  WindowedModes out;
  out.band_hz = config.cutoff_hz;
  out.windows.resize(starts.size());

  auto work = [&](std::size_t k) {
    WindowResult& w = out.windows[k];
    w.start = starts[k];
    w.result = decompose_window(series.window(starts[k], config.window), config.epsilon, how);
    w.max_vaf = max_vaf(w.result);
    w.valid = w.max_vaf >= kMinWindowVaf;
    if (w.valid) {
      try {
        w.matrix = postprocess(w.result, config.cutoff_hz);
      } catch (const EmptySpectrum&) {
        w.matrix.reset();
      }
    }
  };
  if (jobs <= 1) {
    for (std::size_t k = 0; k < starts.size(); ++k) work(k);
  } else {
    for (std::size_t first = 0; first < starts.size(); first += static_cast<std::size_t>(jobs)) {
      std::vector<std::future<void>> batch;
      for (std::size_t k = first; k < std::min(starts.size(), first + static_cast<std::size_t>(jobs)); ++k)
        batch.push_back(std::async(std::launch::async, work, k));
      for (auto& f : batch) f.get();
    }
  }

  std::vector<RMatrix> mats;
  for (const auto& w : out.windows)
    if (w.valid && w.matrix) mats.push_back(*w.matrix);
  if (out.valid_count() == 0) throw DegenerateInput("no valid sliding window (max VAF < 0.01 everywhere)");
  if (mats.empty()) throw EmptySpectrum("no valid window has a mode within the frequency band");
  out.averaged_mode = aggregate(mats);
  return out;
}

inline nlohmann::json to_json(const std::string& segment_id, const WindowedModes& wm) {
  using nlohmann::json;
  json windows = json::array();
  for (const auto& w : wm.windows) {
    json eigen = json::array(), freq = json::array(), growth = json::array();
    for (Eigen::Index j = 0; j < w.result.size(); ++j) {
      const cdouble l = w.result.base.eigenvalues(j);
      const auto rate = to_continuous(l, w.result.base.dt);
      eigen.push_back({{"re", l.real()}, {"im", l.imag()}});
      freq.push_back(rate.freq_hz);
      growth.push_back(rate.growth_per_s);
    }
    windows.push_back({{"start", w.start}, {"valid", w.valid}, {"in_band", w.matrix.has_value()}, {"max_vaf", w.max_vaf},
                       {"eigenvalues", eigen}, {"freq_hz", freq}, {"growth_per_s", growth}, {"vaf", w.result.vaf}});
  }
  json matrix = json::array();
  for (Eigen::Index i = 0; i < wm.averaged_mode.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < wm.averaged_mode.cols(); ++j) row.push_back(wm.averaged_mode(i, j));
    matrix.push_back(row);
  }
  return {{"segment_id", segment_id}, {"band_hz", wm.band_hz}, {"windows", windows}, {"averaged_mode", matrix}};
}

}  // namespace gdmd

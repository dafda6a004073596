#pragma once

// Fixed-length feature vectors from averaged mode matrices or raw series.

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gdmd/ingest.hpp"
#include "gdmd/pipeline.hpp"

namespace gdmd {

struct FeatureVector {
  std::vector<double> values;
  std::vector<std::string> names;

  std::size_t size() const { return values.size(); }
};

struct NodePair {
  Eigen::Index i, j;
  std::string name;
};

/// Node pairs for a task, in the documented order. Basketball node indices:
/// A1..A5 = 0..4, D1..D5 = 5..9, Ring = 10.
inline std::vector<NodePair> task_pairs(Task task, Eigen::Index m, const std::vector<std::string>& labels = {}) {
  std::vector<NodePair> out;
  if (task == Task::all_pairs) {
    const auto names = labels.empty() ? generic_labels(m) : labels;
    if (static_cast<Eigen::Index>(names.size()) != m) throw ContractViolation("task_pairs: label count does not match m");
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i + 1; j < m; ++j) out.push_back({i, j, names[static_cast<std::size_t>(i)] + "-" + names[static_cast<std::size_t>(j)]});
    return out;
  }
  if (m != kBasketballNodes) throw ContractViolation("basketball task needs m = 11, got " + std::to_string(m));
  const auto names = basketball_labels();
  auto add = [&](Eigen::Index i, Eigen::Index j) {
    out.push_back({i, j, names[static_cast<std::size_t>(i)] + "-" + names[static_cast<std::size_t>(j)]});
  };
  const Eigen::Index team = task == Task::defence ? 5 : 0;
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = i + 1; j < 5; ++j) add(team + i, team + j);
  for (Eigen::Index a = 0; a < 5; ++a)
    for (Eigen::Index d = 5; d < 10; ++d) add(a, d);
  if (task == Task::defence)
    for (Eigen::Index d = 5; d < 10; ++d) add(10, d);
  return out;
}

inline FeatureVector gdmd_spectrum(const RMatrix& avg_mode, Task task, const std::vector<std::string>& labels = {}) {
  if (avg_mode.rows() != avg_mode.cols()) throw ContractViolation("gdmd_spectrum: matrix is not square");
  FeatureVector f;
  for (const auto& p : task_pairs(task, avg_mode.rows(), labels)) {
    f.values.push_back(avg_mode(p.i, p.j));
    f.names.push_back(p.name);
  }
  return f;
}

inline constexpr double kPositiveEigenvalue = 1e-10;

/// k smallest eigenvalues > 1e-10 of D^{-1/2} (D - A) D^{-1/2}, ascending.
inline FeatureVector laplacian_eigs(const RMatrix& adjacency, int k) {
  const Eigen::Index m = adjacency.rows();
  if (m != adjacency.cols()) throw ContractViolation("laplacian_eigs: matrix is not square");
  if (k < 1 || k > m - 1) throw ContractViolation("laplacian_eigs: need 1 <= k <= m - 1");
  if (adjacency.minCoeff() < 0.0) throw ContractViolation("laplacian_eigs: negative weight");
  const RVector degree = adjacency.rowwise().sum();
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(degree(i) > 0.0)) throw DegenerateInput("laplacian_eigs: node " + std::to_string(i) + " is isolated");
  const RVector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  RMatrix lap = -adjacency;
  lap.diagonal() += degree;
  RMatrix norm = inv_sqrt.asDiagonal() * lap * inv_sqrt.asDiagonal();
  norm = 0.5 * (norm + norm.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(norm, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("laplacian_eigs: eigensolver failed");
  FeatureVector f;
  for (Eigen::Index i = 0; i < m && static_cast<int>(f.size()) < k; ++i) {
    const double v = solver.eigenvalues()(i);
    if (v > kPositiveEigenvalue) {
      f.values.push_back(v);
      f.names.push_back("lap_eig_" + std::to_string(f.size()));
    }
  }
  if (static_cast<int>(f.size()) < k)
    throw DegenerateInput("laplacian_eigs: only " + std::to_string(f.size()) + " positive eigenvalues, " + std::to_string(k) +
                          " requested (short by " + std::to_string(k - static_cast<int>(f.size())) + ")");
  return f;
}

/// Temporal (mean, max, min) of every selected edge weight.
inline FeatureVector handcrafted(const AdjacencySeries& series, Task task) {
  if (series.frames() < 1) throw ContractViolation("handcrafted: empty series");
  FeatureVector f;
  for (const auto& p : task_pairs(task, series.m(), series.node_labels)) {
    double sum = 0.0, hi = -1e300, lo = 1e300;
    for (Eigen::Index t = 0; t < series.frames(); ++t) {
      const double v = series.tensor(p.i, p.j, t);
      sum += v;
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    f.values.insert(f.values.end(), {sum / static_cast<double>(series.frames()), hi, lo});
    f.names.insert(f.names.end(), {"mean_" + p.name, "max_" + p.name, "min_" + p.name});
  }
  return f;
}

/// Same windowing and reduction as the Graph DMD path, with plain exact DMD
/// on the m^2 x tau unfolding in each window.
inline FeatureVector dmd_spectrum_baseline(const AdjacencySeries& series, Task task, const Config& config, int jobs = 1) {
  const auto wm = decompose_segment(series, config, Decomposer::exact, jobs);
  return gdmd_spectrum(wm.averaged_mode, task, series.node_labels);
}

/// Feature vector for one (already low-passed) series under the configured extractor.
inline FeatureVector extract_features(const AdjacencySeries& series, const Config& config, int jobs = 1) {
  switch (config.extractor) {
    case Extractor::gdmd: return gdmd_spectrum(decompose_segment(series, config, Decomposer::graph, jobs).averaged_mode, config.task, series.node_labels);
    case Extractor::laplacian: return laplacian_eigs(decompose_segment(series, config, Decomposer::graph, jobs).averaged_mode, config.laplacian_k);
    case Extractor::handcrafted: return handcrafted(series, config.task);
    case Extractor::dmd_baseline: return dmd_spectrum_baseline(series, config.task, config, jobs);
  }
  throw ContractViolation("unknown extractor");
}

struct FeatureRow {
  std::string segment_id;
  FeatureVector features;
  std::optional<int> label;
};

/// segment_id, named feature columns, then label when every row has one.
inline void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  if (rows.empty()) throw InputError("no feature rows to write");
  const auto& names = rows.front().features.names;
  bool labelled = true;
  for (const auto& r : rows) {
    if (r.features.names != names) throw ContractViolation("feature rows have different columns");
    labelled = labelled && r.label.has_value();
  }
  out << "segment_id";
  for (const auto& n : names) out << ',' << n;
  if (labelled) out << ",label";
  out << '\n';
  char buf[32];
  for (const auto& r : rows) {
    out << r.segment_id;
    for (double v : r.features.values) {
      std::snprintf(buf, sizeof buf, "%.10g", v);
      out << ',' << buf;
    }
    if (labelled) out << ',' << *r.label;
    out << '\n';
  }
}

/// Inverse of write_feature_csv; a trailing `label` column is optional.
inline std::vector<FeatureRow> read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("feature file is empty");
  auto header = detail::split_csv(detail::trim(line));
  if (header.size() < 2 || header.front() != "segment_id") throw InputError("feature file must start with segment_id");
  const bool labelled = header.back() == "label";
  std::vector<std::string> names(header.begin() + 1, header.end() - (labelled ? 1 : 0));
  if (names.empty()) throw InputError("feature file has no feature columns");
  std::vector<FeatureRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(detail::trim(line));
    if (cells.size() != header.size()) throw InputError("feature line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " fields");
    FeatureRow r{cells[0], {{}, names}, std::nullopt};
    try {
      for (std::size_t k = 1; k <= names.size(); ++k) r.features.values.push_back(std::stod(cells[k]));
    } catch (const std::exception&) {
      throw InputError("feature line " + std::to_string(lineno) + ": malformed number");
    }
    if (labelled) {
      if (cells.back() != "0" && cells.back() != "1") throw InputError("feature line " + std::to_string(lineno) + ": label must be 0 or 1");
      r.label = cells.back() == "1" ? 1 : 0;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace gdmd

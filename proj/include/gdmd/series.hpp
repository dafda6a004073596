#pragma once

#include <string>
#include <vector>

#include "gdmd/tensor.hpp"

namespace gdmd {

/// Time-indexed symmetric adjacency matrices, one m x m slice per frame.
struct AdjacencySeries {
  Tensor3 tensor;                       // dims (m, m, frames)
  std::vector<std::string> node_labels;  // size m
  double fps = 25.0;

  Eigen::Index m() const { return tensor.n1(); }
  Eigen::Index frames() const { return tensor.n3(); }
  double dt() const { return 1.0 / fps; }

  AdjacencySeries window(Eigen::Index first, Eigen::Index count) const {
    return {tensor.frames(first, count), node_labels, fps};
  }
};

/// Labels A1..A5, D1..D5, Ring used by the basketball schema.
inline std::vector<std::string> basketball_labels() {
  return {"A1", "A2", "A3", "A4", "A5", "D1", "D2", "D3", "D4", "D5", "Ring"};
}

/// Labels n1..nm used when agents carry no roles.
inline std::vector<std::string> generic_labels(Eigen::Index m) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < m; ++i) out.push_back("n" + std::to_string(i + 1));
  return out;
}

inline AdjacencySeries make_series(Tensor3 tensor, double fps, std::vector<std::string> labels = {}) {
  if (tensor.n1() != tensor.n2()) throw ContractViolation("adjacency series slices must be square");
  if (labels.empty()) labels = generic_labels(tensor.n1());
  if (static_cast<Eigen::Index>(labels.size()) != tensor.n1()) throw ContractViolation("node label count mismatch");
  if (!(fps > 0.0)) throw ContractViolation("fps must be positive");
  return {std::move(tensor), std::move(labels), fps};
}

}  // namespace gdmd

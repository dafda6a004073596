#pragma once

// Trajectory ingestion: CSV readers/writers, per-frame agent ordering,
// Gaussian-kernel adjacency series and zero-phase low-pass filtering.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gdmd/config.hpp"
#include "gdmd/series.hpp"

namespace gdmd {

enum class Role { attacker, defender, ball, ring, generic };

inline std::string to_string(Role r) {
  switch (r) {
    case Role::attacker: return "attacker";
    case Role::defender: return "defender";
    case Role::ball: return "ball";
    case Role::ring: return "ring";
    case Role::generic: return "generic";
  }
  return "?";
}

inline Role parse_role(const std::string& s) {
  if (s == "attacker") return Role::attacker;
  if (s == "defender") return Role::defender;
  if (s == "ball") return Role::ball;
  if (s == "ring") return Role::ring;
  if (s == "generic") return Role::generic;
  throw InputError("unknown role '" + s + "'");
}

struct AgentState {
  int agent_id = 0;
  Role role = Role::generic;
  double x = 0.0;  // metres
  double y = 0.0;
};

/// One time stamp; agents sorted by agent_id.
struct Frame {
  std::vector<AgentState> agents;
};

struct Segment {
  std::string segment_id;
  double fps = 25.0;
  std::vector<Frame> frames;
};

inline constexpr int kAttackers = 5;
inline constexpr int kDefenders = 5;
inline constexpr int kBasketballNodes = 11;

/// exp(-d^2 / (2 sigma)).
inline double kernel_weight(double distance_m, double sigma) {
  if (!(sigma > 0.0)) throw ContractViolation("kernel_weight: sigma must be positive");
  if (distance_m < 0.0) throw ContractViolation("kernel_weight: negative distance");
  return std::exp(-distance_m * distance_m / (2.0 * sigma));
}

inline double distance(const AgentState& a, const AgentState& b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline bool is_basketball(const Frame& f) {
  return std::any_of(f.agents.begin(), f.agents.end(), [](const AgentState& a) { return a.role != Role::generic; });
}

namespace detail {

/// Two members nearest the ball, then repeatedly the member minimizing the
/// summed distance to those already placed. Ties go to the lower agent id
/// (members arrive sorted by id and comparisons are strict).
inline std::vector<std::size_t> order_team(const Frame& f, const std::vector<std::size_t>& team, const AgentState& ball) {
  std::vector<std::size_t> rest = team;
  std::vector<std::size_t> placed;
  auto take = [&](auto&& cost) {
    auto best = rest.begin();
    double best_cost = cost(*best);
    for (auto it = std::next(rest.begin()); it != rest.end(); ++it) {
      const double c = cost(*it);
      if (c < best_cost) {
        best = it;
        best_cost = c;
      }
    }
    placed.push_back(*best);
    rest.erase(best);
  };
  auto to_ball = [&](std::size_t k) { return distance(f.agents[k], ball); };
  auto to_placed = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t p : placed) s += distance(f.agents[k], f.agents[p]);
    return s;
  };
  take(to_ball);
  take(to_ball);
  while (!rest.empty()) take(to_placed);
  return placed;
}

}  // namespace detail

/// Node order for one frame, as indices into frame.agents.
/// Basketball roster: A1..A5, D1..D5, Ring (the ball is only the reference).
/// Generic roster: agents in id order.
inline std::vector<std::size_t> order_agents(const Frame& frame) {
  if (!is_basketball(frame)) {
    std::vector<std::size_t> idx(frame.agents.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return frame.agents[a].agent_id < frame.agents[b].agent_id; });
    return idx;
  }
  std::vector<std::size_t> attackers, defenders, balls, rings;
  for (std::size_t k = 0; k < frame.agents.size(); ++k) {
    switch (frame.agents[k].role) {
      case Role::attacker: attackers.push_back(k); break;
      case Role::defender: defenders.push_back(k); break;
      case Role::ball: balls.push_back(k); break;
      case Role::ring: rings.push_back(k); break;
      case Role::generic: throw InputError("roster mixes generic agents with basketball roles");
    }
  }
  if (attackers.size() != kAttackers || defenders.size() != kDefenders || balls.size() != 1 || rings.size() != 1)
    throw InputError("basketball roster needs 5 attackers, 5 defenders, 1 ball and 1 ring");
  auto by_id = [&](std::size_t a, std::size_t b) { return frame.agents[a].agent_id < frame.agents[b].agent_id; };
  std::sort(attackers.begin(), attackers.end(), by_id);
  std::sort(defenders.begin(), defenders.end(), by_id);
  const AgentState& ball = frame.agents[balls[0]];
  std::vector<std::size_t> out = detail::order_team(frame, attackers, ball);
  const auto d = detail::order_team(frame, defenders, ball);
  out.insert(out.end(), d.begin(), d.end());
  out.push_back(rings[0]);
  return out;
}

/// Gaussian-kernel adjacency series; nodes re-ordered in every frame.
inline AdjacencySeries build_adjacency_series(const Segment& segment, const Config& config) {
  if (segment.frames.empty()) throw InputError("segment " + segment.segment_id + " has no frames");
  const bool basketball = is_basketball(segment.frames.front());
  const auto m = static_cast<Eigen::Index>(order_agents(segment.frames.front()).size());
  Tensor3 t(m, m, static_cast<Eigen::Index>(segment.frames.size()));
  for (std::size_t k = 0; k < segment.frames.size(); ++k) {
    const Frame& f = segment.frames[k];
    const auto order = order_agents(f);
    if (static_cast<Eigen::Index>(order.size()) != m) throw InputError("roster changes within segment " + segment.segment_id);
    const auto tk = static_cast<Eigen::Index>(k);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i, tk) = 1.0;
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const AgentState& a = f.agents[order[static_cast<std::size_t>(i)]];
        const AgentState& b = f.agents[order[static_cast<std::size_t>(j)]];
        const bool ring = basketball && (a.role == Role::ring || b.role == Role::ring);
        const double w = kernel_weight(distance(a, b), ring ? config.sigma_ring : config.sigma_player);
        t(i, j, tk) = t(j, i, tk) = w;
      }
    }
  }
  return make_series(std::move(t), segment.fps, basketball ? basketball_labels() : generic_labels(m));
}

/// Second-order Butterworth low-pass section (bilinear transform, prewarped).
struct Biquad {
  double b0, b1, b2, a1, a2;

  static Biquad butterworth_lowpass(double cutoff_hz, double fps) {
    const double k = std::tan(std::numbers::pi * cutoff_hz / fps);
    const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k * k);
    const double b0 = k * k * norm;
    return {b0, 2.0 * b0, b0, 2.0 * (k * k - 1.0) * norm, (1.0 - std::numbers::sqrt2 * k + k * k) * norm};
  }

  /// Direct form II transposed, state initialised to the steady state of a
  /// constant input equal to x[0].
  std::vector<double> run(const std::vector<double>& x) const {
    std::vector<double> y(x.size());
    if (x.empty()) return y;
    double z1 = (1.0 - b0) * x[0];
    double z2 = (b2 - a2) * x[0];
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double out = b0 * x[n] + z1;
      z1 = b1 * x[n] - a1 * out + z2;
      z2 = b2 * x[n] - a2 * out;
      y[n] = out;
    }
    return y;
  }
};

/// Forward-backward application with odd-reflection padding at both ends.
inline std::vector<double> filtfilt(const Biquad& f, const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) return x;
  const std::size_t pad = std::min<std::size_t>(9, n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * x[0] - x[k]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * x[n - 1] - x[n - 1 - k]);
  auto y = f.run(ext);
  std::reverse(y.begin(), y.end());
  y = f.run(y);
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

/// Zero-phase low-pass of every edge series; output clamped to [0, 1] and
/// kept exactly symmetric.
inline AdjacencySeries lowpass(const AdjacencySeries& series, double cutoff_hz) {
  if (!(cutoff_hz > 0.0) || cutoff_hz >= series.fps / 2.0) throw ContractViolation("lowpass: cutoff must lie in (0, fps/2)");
  const Biquad f = Biquad::butterworth_lowpass(cutoff_hz, series.fps);
  AdjacencySeries out = series;
  const Eigen::Index m = series.m(), frames = series.frames();
  std::vector<double> edge(static_cast<std::size_t>(frames));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      for (Eigen::Index t = 0; t < frames; ++t) edge[static_cast<std::size_t>(t)] = series.tensor(i, j, t);
      const auto y = filtfilt(f, edge);
      for (Eigen::Index t = 0; t < frames; ++t) {
        const double v = std::clamp(y[static_cast<std::size_t>(t)], 0.0, 1.0);
        out.tensor(i, j, t) = out.tensor(j, i, t) = v;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV formats

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Reads `segment_id,frame,agent_id,role,x,y`. Segments come back in order of
/// first appearance; frames must be contiguous from 0 with a fixed roster.
inline std::vector<Segment> read_trajectories(std::istream& in, double fps) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "segment_id,frame,agent_id,role,x,y")
    throw InputError("trajectory file must start with header segment_id,frame,agent_id,role,x,y");
  std::vector<Segment> segments;
  std::map<std::string, std::size_t> index;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 6) throw InputError("trajectory line " + std::to_string(lineno) + ": expected 6 fields");
    auto [it, inserted] = index.try_emplace(cells[0], segments.size());
    if (inserted) segments.push_back({cells[0], fps, {}});
    Segment& seg = segments[it->second];
    int frame = 0;
    AgentState a;
    try {
      frame = std::stoi(cells[1]);
      a.agent_id = std::stoi(cells[2]);
      a.x = std::stod(cells[4]);
      a.y = std::stod(cells[5]);
    } catch (const std::exception&) {
      throw InputError("trajectory line " + std::to_string(lineno) + ": malformed number");
    }
    a.role = parse_role(cells[3]);
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw InputError("trajectory line " + std::to_string(lineno) + ": non-finite position");
    if (frame < 0) throw InputError("trajectory line " + std::to_string(lineno) + ": negative frame index");
    if (static_cast<std::size_t>(frame) >= seg.frames.size()) seg.frames.resize(static_cast<std::size_t>(frame) + 1);
    seg.frames[static_cast<std::size_t>(frame)].agents.push_back(a);
  }
  for (Segment& seg : segments) {
    for (std::size_t k = 0; k < seg.frames.size(); ++k) {
      auto& agents = seg.frames[k].agents;
      if (agents.empty()) throw InputError("segment " + seg.segment_id + ": frame " + std::to_string(k) + " missing");
      std::sort(agents.begin(), agents.end(), [](const AgentState& a, const AgentState& b) { return a.agent_id < b.agent_id; });
      const auto& ref = seg.frames[0].agents;
      bool same = agents.size() == ref.size();
      for (std::size_t i = 0; same && i < agents.size(); ++i)
        same = agents[i].agent_id == ref[i].agent_id && agents[i].role == ref[i].role;
      if (!same) throw InputError("segment " + seg.segment_id + ": roster differs at frame " + std::to_string(k));
      for (std::size_t i = 1; i < agents.size(); ++i)
        if (agents[i].agent_id == agents[i - 1].agent_id)
          throw InputError("segment " + seg.segment_id + ": duplicate agent in frame " + std::to_string(k));
    }
  }
  return segments;
}

inline void write_trajectories(std::ostream& out, const std::vector<Segment>& segments) {
  out << "segment_id,frame,agent_id,role,x,y\n";
  char buf[64];
  for (const Segment& seg : segments) {
    for (std::size_t k = 0; k < seg.frames.size(); ++k) {
      for (const AgentState& a : seg.frames[k].agents) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", a.x, a.y);
        out << seg.segment_id << ',' << k << ',' << a.agent_id << ',' << to_string(a.role) << ',' << buf << '\n';
      }
    }
  }
}

struct LabelRow {
  std::string segment_id;
  int label = 0;
};

inline std::vector<LabelRow> read_labels(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "segment_id,label") throw InputError("labels file must start with header segment_id,label");
  std::vector<LabelRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 2 || (cells[1] != "0" && cells[1] != "1"))
      throw InputError("labels line " + std::to_string(lineno) + ": expected segment_id,{0|1}");
    rows.push_back({cells[0], cells[1] == "1" ? 1 : 0});
  }
  return rows;
}

inline void write_labels(std::ostream& out, const std::vector<LabelRow>& rows) {
  out << "segment_id,label\n";
  for (const auto& r : rows) out << r.segment_id << ',' << r.label << '\n';
}

}  // namespace gdmd

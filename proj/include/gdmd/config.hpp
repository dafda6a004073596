#pragma once

// Run configuration, read from a plain `key = value` text file. Lines starting
// with '#' are comments. Unknown keys are rejected.

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "gdmd/error.hpp"

namespace gdmd {

enum class Task { defence, offence, all_pairs };
enum class Extractor { gdmd, laplacian, handcrafted, dmd_baseline };

inline double sigma_for_half_weight(double distance_m) { return distance_m * distance_m / (2.0 * std::log(2.0)); }

struct Config {
  double fps = 25.0;
  double sigma_player = sigma_for_half_weight(1.5);
  double sigma_ring = sigma_for_half_weight(6.0);
  double cutoff_hz = 2.0;
  int window = 50;
  int overlap = 25;
  double epsilon = 1e-5;

  Task task = Task::defence;
  Extractor extractor = Extractor::gdmd;
  double l2 = 1e-4;
  int repeats = 5;
  int folds = 5;
  int laplacian_k = 10;

  void validate() const {
    if (!(fps > 0.0)) throw InputError("config: fps must be positive");
    if (!(sigma_player > 0.0) || !(sigma_ring > 0.0)) throw InputError("config: sigma must be positive");
    if (!(cutoff_hz > 0.0) || cutoff_hz >= fps / 2.0) throw InputError("config: cutoff_hz must lie in (0, fps/2)");
    if (window < 3 || overlap < 0 || overlap >= window) throw InputError("config: need window >= 3 and 0 <= overlap < window");
    if (!(epsilon > 0.0)) throw InputError("config: epsilon must be positive");
    if (l2 < 0.0) throw InputError("config: l2 must be nonnegative");
    if (repeats < 1 || folds < 2) throw InputError("config: need repeats >= 1 and folds >= 2");
    if (laplacian_k < 1) throw InputError("config: laplacian_k must be >= 1");
  }
};

inline std::string to_string(Task t) {
  switch (t) {
    case Task::defence: return "defence";
    case Task::offence: return "offence";
    case Task::all_pairs: return "all_pairs";
  }
  return "?";
}

inline std::string to_string(Extractor e) {
  switch (e) {
    case Extractor::gdmd: return "gdmd";
    case Extractor::laplacian: return "laplacian";
    case Extractor::handcrafted: return "handcrafted";
    case Extractor::dmd_baseline: return "dmd_baseline";
  }
  return "?";
}

inline Task parse_task(const std::string& s) {
  if (s == "defence") return Task::defence;
  if (s == "offence") return Task::offence;
  if (s == "all_pairs") return Task::all_pairs;
  throw InputError("unknown task '" + s + "'");
}

inline Extractor parse_extractor(const std::string& s) {
  if (s == "gdmd") return Extractor::gdmd;
  if (s == "laplacian") return Extractor::laplacian;
  if (s == "handcrafted") return Extractor::handcrafted;
  if (s == "dmd_baseline") return Extractor::dmd_baseline;
  throw InputError("unknown extractor '" + s + "'");
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(out)) throw InputError("config: bad number for " + key + ": '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d)) throw InputError("config: " + key + " must be an integer");
  return static_cast<int>(d);
}

}  // namespace detail

inline Config parse_config(std::istream& in) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (key == "fps") c.fps = detail::parse_double(key, val);
    else if (key == "sigma_player") c.sigma_player = detail::parse_double(key, val);
    else if (key == "sigma_ring") c.sigma_ring = detail::parse_double(key, val);
    else if (key == "cutoff_hz") c.cutoff_hz = detail::parse_double(key, val);
    else if (key == "window") c.window = detail::parse_int(key, val);
    else if (key == "overlap") c.overlap = detail::parse_int(key, val);
    else if (key == "epsilon") c.epsilon = detail::parse_double(key, val);
    else if (key == "task") c.task = parse_task(val);
    else if (key == "extractor") c.extractor = parse_extractor(val);
    else if (key == "l2") c.l2 = detail::parse_double(key, val);
    else if (key == "repeats") c.repeats = detail::parse_int(key, val);
    else if (key == "folds") c.folds = detail::parse_int(key, val);
    else if (key == "laplacian_k") c.laplacian_k = detail::parse_int(key, val);
    else throw InputError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  return parse_config(in);
}

}  // namespace gdmd

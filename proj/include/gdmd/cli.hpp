#pragma once

// Command-line front end. `run` parses argv and dispatches, returning the
// process exit code: 0 ok, 1 runtime or numerical failure, 2 usage/config.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gdmd/classify.hpp"
#include "gdmd/features.hpp"
#include "gdmd/ingest.hpp"
#include "gdmd/pipeline.hpp"
#include "gdmd/synth.hpp"

namespace gdmd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::string config_path;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir = ".";
};

struct Overrides {
  std::optional<std::string> task, extractor;
  std::optional<int> window, overlap;
  std::optional<double> epsilon, cutoff;
};

namespace detail {

inline void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << contents;
    f.flush();
    if (!f) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing --") + what);
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot open ") + what + " file " + path);
  return in;
}

inline Config make_config(const Globals& g, const Overrides& o) {
  Config c = g.config_path.empty() ? Config{} : load_config(g.config_path);
  if (o.task) c.task = parse_task(*o.task);
  if (o.extractor) c.extractor = parse_extractor(*o.extractor);
  if (o.window) c.window = *o.window;
  if (o.overlap) c.overlap = *o.overlap;
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.cutoff) c.cutoff_hz = *o.cutoff;
  c.validate();
  return c;
}

inline json config_json(const Config& c) {
  return {{"fps", c.fps},         {"sigma_player", c.sigma_player}, {"sigma_ring", c.sigma_ring}, {"cutoff_hz", c.cutoff_hz},
          {"window", c.window},   {"overlap", c.overlap},           {"epsilon", c.epsilon},       {"task", to_string(c.task)},
          {"extractor", to_string(c.extractor)}, {"l2", c.l2},      {"repeats", c.repeats},       {"folds", c.folds}};
}

inline std::vector<Segment> load_segments(const std::string& path, const Config& c) {
  auto in = open_input(path, "input");
  auto segs = read_trajectories(in, c.fps);
  if (segs.empty()) throw InputError("trajectory file " + path + " holds no segments");
  return segs;
}

inline std::vector<LabelRow> load_labels(const std::string& path) {
  auto in = open_input(path, "labels");
  return read_labels(in);
}

inline std::optional<int> label_for(const std::vector<LabelRow>& labels, const std::string& id) {
  for (const auto& r : labels)
    if (r.segment_id == id) return r.label;
  return std::nullopt;
}

/// fn(k) for k in [0, n), `jobs` at a time; results kept in index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, int jobs, Fn fn) {
  std::vector<T> out;
  out.reserve(n);
  if (jobs <= 1) {
    for (std::size_t k = 0; k < n; ++k) out.push_back(fn(k));
    return out;
  }
  for (std::size_t first = 0; first < n; first += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<T>> batch;
    for (std::size_t k = first; k < std::min(n, first + static_cast<std::size_t>(jobs)); ++k) batch.push_back(std::async(std::launch::async, fn, k));
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

inline AdjacencySeries prepared(const Segment& s, const Config& c) { return lowpass(build_adjacency_series(s, c), c.cutoff_hz); }

template <class F>
auto for_segment(const Segment& s, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError("segment " + s.segment_id + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ContractViolation("segment " + s.segment_id + ": " + e.what());
  } catch (const DegenerateInput& e) {
    throw DegenerateInput("segment " + s.segment_id + ": " + e.what());
  } catch (const EmptySpectrum& e) {
    throw EmptySpectrum("segment " + s.segment_id + ": " + e.what());
  }
}

inline json matrix_json(const RMatrix& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline std::string curve_csv(const char* header, const std::vector<CurvePoint>& pts) {
  std::string s = std::string(header) + "\n";
  char buf[64];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", p.x, p.y);
    s += buf;
  }
  return s;
}

inline json summary_json(const MetricSummary& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

}  // namespace detail

// ---- synth ----

struct SynthArgs {
  std::string preset = "planted-edge";
  int n = 100;
  std::optional<double> amplitude, freq;
  double jitter = 1.0;
  int frames = 0;
};

inline Segment orbit_fixture(const std::string& id, double radius, double freq, double fps, Eigen::Index frames, std::uint64_t seed) {
  if (!(radius > 0.0) || radius > 3.0) throw InfeasibleSpec("orbit preset: amplitude must lie in (0, 3] m");
  if (!(freq > 0.0) || freq >= fps / 4.0) throw InfeasibleSpec("orbit preset: frequency must lie in (0, fps/4) Hz");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double phase = angle(rng);
  OrbitConfig c;
  c.segment_id = id;
  c.fps = fps;
  c.frames = frames;
  c.agents = {{0, Role::generic, 0.0, 0.0, radius, freq, phase},
              {1, Role::generic, 0.0, 0.0, radius, -freq, phase},
              {2, Role::generic, 2.5, 0.0, 0.0, 0.0, 0.0},
              {3, Role::generic, 0.0, 2.5, 0.0, 0.0, 0.0}};
  return gen_trajectories(c, rng());
}

inline int cmd_synth(const Globals& g, const Overrides& o, const SynthArgs& a, std::ostream& out) {
  const Config c = detail::make_config(g, o);
  if (a.n < 1) throw InfeasibleSpec("--n must be positive");
  LabeledSegments data;
  if (a.preset == "planted-edge" || a.preset == "static") {
    DatasetSpec spec;
    spec.n_per_class = a.n;
    spec.fps = c.fps;
    spec.jitter = a.jitter;
    if (a.amplitude) spec.planted_radius_m = *a.amplitude;
    if (a.freq) spec.planted_freq_hz = *a.freq;
    if (a.frames > 0) spec.frames = a.frames;
    if (a.preset == "static") spec.position_noise_m = 0.0;
    data = gen_labeled_dataset(spec, g.seed);
    if (a.preset == "static")
      for (auto& s : data.segments)
        for (auto& f : s.frames) f = s.frames.front();
  } else if (a.preset == "orbit") {
    std::mt19937_64 rng(g.seed);
    for (int k = 0; k < a.n; ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "orbit%04d", k);
      data.segments.push_back(orbit_fixture(id, a.amplitude.value_or(1.0), a.freq.value_or(0.5), c.fps, a.frames > 0 ? a.frames : 250, rng()));
      data.labels.push_back({id, 0});
    }
  } else {
    throw UsageError("unknown preset '" + a.preset + "' (planted-edge, static, orbit)");
  }
  std::ostringstream traj, labels;
  write_trajectories(traj, data.segments);
  write_labels(labels, data.labels);
  const fs::path dir(g.out_dir);
  detail::write_atomic(dir / "trajectories.csv", traj.str());
  detail::write_atomic(dir / "labels.csv", labels.str());
  out << "wrote " << data.segments.size() << " segments to " << (dir / "trajectories.csv").string() << " and " << (dir / "labels.csv").string() << '\n';
  return 0;
}

// ---- ingest-check ----

inline int cmd_ingest_check(const Globals& g, const Overrides& o, const std::string& input, const std::string& labels_path, std::ostream& out) {
  const Config c = detail::make_config(g, o);
  const auto segs = detail::load_segments(input, c);
  const auto labels = labels_path.empty() ? std::vector<LabelRow>{} : detail::load_labels(labels_path);
  json rows = json::array();
  std::size_t unlabelled = 0;
  for (const auto& s : segs) {
    const auto series = detail::for_segment(s, [&] { return build_adjacency_series(s, c); });
    double lo = 1.0, hi = 0.0;
    for (Eigen::Index t = 0; t < series.frames(); ++t)
      for (Eigen::Index i = 0; i < series.m(); ++i)
        for (Eigen::Index j = i + 1; j < series.m(); ++j) {
          lo = std::min(lo, series.tensor(i, j, t));
          hi = std::max(hi, series.tensor(i, j, t));
        }
    const std::size_t windows = series.frames() >= c.window ? window_starts(series.frames(), c.window, c.overlap).size() : 0;
    json r{{"segment_id", s.segment_id}, {"frames", series.frames()}, {"nodes", series.node_labels}, {"basketball", is_basketball(s.frames.front())},
           {"min_weight", lo}, {"max_weight", hi}, {"windows", windows}};
    if (!labels_path.empty()) {
      const auto l = detail::label_for(labels, s.segment_id);
      if (l) r["label"] = *l;
      else ++unlabelled;
    }
    rows.push_back(r);
  }
  json report{{"segments", rows}, {"segment_count", segs.size()}, {"config", detail::config_json(c)}};
  if (!labels_path.empty()) report["unlabelled"] = unlabelled;
  detail::write_atomic(fs::path(g.out_dir) / "ingest_report.json", report.dump(2) + "\n");
  out << segs.size() << " segments ok";
  if (unlabelled) out << ", " << unlabelled << " without a label";
  out << '\n';
  return 0;
}

// ---- decompose ----

inline int cmd_decompose(const Globals& g, const Overrides& o, const std::string& input, const std::string& how, std::ostream& out) {
  const Config c = detail::make_config(g, o);
  Decomposer d;
  if (how == "graph") d = Decomposer::graph;
  else if (how == "exact") d = Decomposer::exact;
  else throw UsageError("--decomposer must be graph or exact");
  const auto segs = detail::load_segments(input, c);
  auto records = detail::parallel_map<json>(segs.size(), g.jobs, [&](std::size_t k) {
    const Segment& s = segs[k];
    return detail::for_segment(s, [&] {
      const auto wm = decompose_segment(detail::prepared(s, c), c, d);
      json r = to_json(s.segment_id, wm);
      for (std::size_t w = 0; w < wm.windows.size(); ++w) {
        const auto& res = wm.windows[w].result;
        if (res.size() == 0) continue;
        const auto top = static_cast<Eigen::Index>(std::max_element(res.vaf.begin(), res.vaf.end()) - res.vaf.begin());
        const cdouble l = res.base.eigenvalues(top);
        r["windows"][w]["dominant"] = {{"re", l.real()}, {"im", l.imag()}, {"freq_hz", to_continuous(l, res.base.dt).freq_hz},
                                       {"vaf", res.vaf[static_cast<std::size_t>(top)]}};
      }
      return r;
    });
  });
  json doc{{"decomposer", how}, {"config", detail::config_json(c)}, {"segments", records}};
  detail::write_atomic(fs::path(g.out_dir) / "modes.json", doc.dump(2) + "\n");
  out << "decomposed " << segs.size() << " segments\n";
  return 0;
}

// ---- features ----

inline std::vector<FeatureRow> compute_features(const std::vector<Segment>& segs, const std::vector<LabelRow>& labels, const Config& c, int jobs) {
  return detail::parallel_map<FeatureRow>(segs.size(), jobs, [&](std::size_t k) {
    const Segment& s = segs[k];
    return detail::for_segment(s, [&] { return FeatureRow{s.segment_id, extract_features(detail::prepared(s, c), c), detail::label_for(labels, s.segment_id)}; });
  });
}

inline int cmd_features(const Globals& g, const Overrides& o, const std::string& input, const std::string& labels_path, std::ostream& out) {
  const Config c = detail::make_config(g, o);
  const auto segs = detail::load_segments(input, c);
  const auto labels = labels_path.empty() ? std::vector<LabelRow>{} : detail::load_labels(labels_path);
  const auto rows = compute_features(segs, labels, c, g.jobs);
  std::ostringstream csv;
  write_feature_csv(csv, rows);
  detail::write_atomic(fs::path(g.out_dir) / "features.csv", csv.str());
  out << rows.size() << " rows x " << rows.front().features.size() << " " << to_string(c.extractor) << " features\n";
  return 0;
}

// ---- classify ----

struct ClassifyArgs {
  std::string input, labels, features;
  std::string odds = "full";
  bool shuffle_labels = false;
};

inline LabeledDataset to_dataset(const std::vector<FeatureRow>& rows) {
  LabeledDataset d;
  d.names = rows.front().features.names;
  d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.names.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!rows[k].label) throw InputError("segment " + rows[k].segment_id + " has no label");
    for (std::size_t f = 0; f < d.names.size(); ++f) d.X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f)) = rows[k].features.values[f];
    d.y.push_back(*rows[k].label);
  }
  return d;
}

inline int cmd_classify(const Globals& g, const Overrides& o, const ClassifyArgs& a, std::ostream& out) {
  const Config c = detail::make_config(g, o);
  if (a.odds != "full" && a.odds != "per-feature" && a.odds != "none") throw UsageError("--odds must be full, per-feature or none");
  std::vector<FeatureRow> rows;
  if (!a.features.empty()) {
    if (!a.input.empty()) throw UsageError("give either --features or --input, not both");
    auto in = detail::open_input(a.features, "features");
    rows = read_feature_csv(in);
  } else {
    const auto segs = detail::load_segments(a.input, c);
    rows = compute_features(segs, detail::load_labels(a.labels), c, g.jobs);
  }
  if (rows.empty()) throw InputError("no feature rows");
  LabeledDataset data = to_dataset(rows);
  if (a.shuffle_labels) {
    std::mt19937_64 rng(g.seed ^ 0x5eedULL);
    std::shuffle(data.y.begin(), data.y.end(), rng);
  }

  const auto rep = cross_validate(data, c.l2, c.repeats, c.folds, g.seed);
  json evals = json::array();
  for (std::size_t k = 0; k < rep.runs.size(); ++k) {
    const auto& m = rep.runs[k];
    const int r = static_cast<int>(k) / c.folds + 1, f = static_cast<int>(k) % c.folds + 1;
    evals.push_back({{"repeat", r}, {"fold", f}, {"accuracy", m.accuracy}, {"auc", m.auc}, {"f_measure", m.f_measure}, {"precision", m.precision}, {"recall", m.recall}});
    char line[160];
    std::snprintf(line, sizeof line, "evaluation %zu/%zu (repeat %d fold %d): accuracy %.4f auc %.4f f %.4f\n", k + 1, rep.runs.size(), r, f, m.accuracy, m.auc,
                  m.f_measure);
    out << line;
  }
  const auto pooled = evaluate(rep.pooled_scores, rep.pooled_labels);

  json doc{{"extractor", a.features.empty() ? to_string(c.extractor) : "file"},
           {"task", to_string(c.task)},
           {"samples", data.rows()},
           {"positives", data.positives()},
           {"features", data.X.cols()},
           {"seed", g.seed},
           {"shuffled_labels", a.shuffle_labels},
           {"repeats", c.repeats},
           {"folds", c.folds},
           {"l2", c.l2},
           {"accuracy", detail::summary_json(rep.accuracy)},
           {"auc", detail::summary_json(rep.auc)},
           {"f_measure", detail::summary_json(rep.f_measure)},
           {"precision", detail::summary_json(rep.precision)},
           {"recall", detail::summary_json(rep.recall)},
           {"pooled_auc", pooled.auc},
           {"evaluations", evals}};
  if (a.odds != "none") {
    json ors = json::array();
    for (const auto& r : odds_ratios(data, a.odds == "full" ? OddsMode::full_model : OddsMode::per_feature)) {
      json e{{"feature", r.name}, {"estimable", r.estimable}, {"separation", r.separation}};
      if (r.estimable) {
        e["odds_ratio"] = r.odds_ratio;
        e["p_value"] = r.p_value;
        e["ci95"] = {r.ci_low, r.ci_high};
      }
      ors.push_back(e);
    }
    doc["odds_ratios"] = {{"mode", a.odds}, {"entries", ors}};
  }
  const fs::path dir(g.out_dir);
  detail::write_atomic(dir / "metrics.json", doc.dump(2) + "\n");
  detail::write_atomic(dir / "roc.csv", detail::curve_csv("fpr,tpr", pooled.roc));
  detail::write_atomic(dir / "pr.csv", detail::curve_csv("recall,precision", pooled.pr));
  char line[160];
  std::snprintf(line, sizeof line, "accuracy %.4f +- %.4f, auc %.4f +- %.4f, f %.4f +- %.4f\n", rep.accuracy.mean, rep.accuracy.sd, rep.auc.mean, rep.auc.sd,
                rep.f_measure.mean, rep.f_measure.sd);
  out << line;
  return 0;
}

// ---- reconstruct ----

struct ReconstructArgs {
  std::string input;
  std::vector<double> epsilons{1e-3, 1e-5, 1e-8};
  std::vector<int> windows{25, 50, 75};
  std::vector<double> cutoffs{0.5, 1.0, 2.0, 4.0};
  int max_segments = 0;
};

/// Mean over sliding windows of the element-wise absolute reconstruction error.
inline double windowed_error(const AdjacencySeries& s, int window, int overlap, double eps) {
  double acc = 0.0;
  const auto starts = window_starts(s.frames(), window, overlap);
  for (Eigen::Index st : starts) {
    const auto w = s.window(st, window);
    acc += mean_abs_reconstruction_error(w, graph_dmd(w, eps));
  }
  return acc / static_cast<double>(starts.size());
}

inline int cmd_reconstruct(const Globals& g, const Overrides& o, const ReconstructArgs& a, std::ostream& out) {
  const Config c = detail::make_config(g, o);
  auto segs = detail::load_segments(a.input, c);
  if (a.max_segments > 0 && segs.size() > static_cast<std::size_t>(a.max_segments)) segs.resize(static_cast<std::size_t>(a.max_segments));
  for (double e : a.epsilons)
    if (!(e > 0.0)) throw UsageError("epsilons must be positive");
  for (int w : a.windows)
    if (w < 3) throw UsageError("window sizes must be >= 3");
  for (double f : a.cutoffs)
    if (!(f > 0.0) || f >= c.fps / 2.0) throw UsageError("cutoffs must lie in (0, fps/2)");

  struct Row {
    std::vector<double> eps, win, cut;
  };
  auto rows = detail::parallel_map<Row>(segs.size(), g.jobs, [&](std::size_t k) {
    const Segment& s = segs[k];
    return detail::for_segment(s, [&] {
      Row r;
      const auto raw = build_adjacency_series(s, c);
      const auto filtered = lowpass(raw, c.cutoff_hz);
      for (double e : a.epsilons) r.eps.push_back(windowed_error(filtered, c.window, c.overlap, e));
      for (int w : a.windows) r.win.push_back(windowed_error(filtered, w, w / 2, c.epsilon));
      for (double f : a.cutoffs) r.cut.push_back(windowed_error(lowpass(raw, f), c.window, c.overlap, c.epsilon));
      return r;
    });
  });

  auto sweep = [&](const char* key, auto values, auto Row::*field) {
    json entries = json::array();
    for (std::size_t v = 0; v < values.size(); ++v) {
      double mean = 0.0;
      json per = json::array();
      for (const auto& r : rows) {
        mean += (r.*field)[v] / static_cast<double>(rows.size());
        per.push_back((r.*field)[v]);
      }
      entries.push_back({{key, values[v]}, {"mean_abs_reconstruction_error", mean}, {"per_segment", per}});
    }
    return entries;
  };
  json ids = json::array();
  for (const auto& s : segs) ids.push_back(s.segment_id);
  json eps_sweep = sweep("epsilon", a.epsilons, &Row::eps);
  bool monotone = true;
  {
    std::vector<std::pair<double, double>> by_eps;
    for (const auto& e : eps_sweep) by_eps.emplace_back(e["epsilon"].get<double>(), e["mean_abs_reconstruction_error"].get<double>());
    std::sort(by_eps.begin(), by_eps.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t k = 1; k < by_eps.size(); ++k) monotone = monotone && by_eps[k].second <= by_eps[k - 1].second;
  }
  json doc{{"segments", ids},
           {"config", detail::config_json(c)},
           {"epsilon_sweep", eps_sweep},
           {"epsilon_error_non_increasing", monotone},
           {"window_sweep", sweep("window", a.windows, &Row::win)},
           {"cutoff_sweep", sweep("cutoff_hz", a.cutoffs, &Row::cut)}};
  detail::write_atomic(fs::path(g.out_dir) / "reconstruction.json", doc.dump(2) + "\n");
  for (const auto& e : doc["epsilon_sweep"]) {
    char line[96];
    std::snprintf(line, sizeof line, "epsilon %g: mean abs error %.3e\n", e["epsilon"].get<double>(), e["mean_abs_reconstruction_error"].get<double>());
    out << line;
  }
  return 0;
}

// ---- entry point ----

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Graph DMD for multi-agent adjacency-matrix series", "gdmd"};
  app.require_subcommand(1);
  Globals g;
  Overrides o;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "output directory");

  auto pipeline_opts = [&](CLI::App* s) {
    s->add_option("--task", o.task, "defence | offence | all_pairs");
    s->add_option("--extractor", o.extractor, "gdmd | laplacian | handcrafted | dmd_baseline");
    s->add_option("--window", o.window, "frames per sliding window");
    s->add_option("--overlap", o.overlap, "frames shared by consecutive windows");
    s->add_option("--epsilon", o.epsilon, "TT-SVD tolerance");
    s->add_option("--cutoff", o.cutoff, "low-pass and band cutoff, Hz");
  };

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "write synthetic trajectories and labels");
  synth->add_option("--preset", sa.preset, "planted-edge | static | orbit");
  synth->add_option("--n", sa.n, "segments per class (orbit: total)");
  synth->add_option("--amplitude", sa.amplitude, "orbit radius of the planted agent, m");
  synth->add_option("--freq", sa.freq, "orbit frequency, Hz");
  synth->add_option("--jitter", sa.jitter, "per-segment variability in [0, 1]");
  synth->add_option("--frames", sa.frames, "frames per segment");

  std::string input, labels;
  auto* check = app.add_subcommand("ingest-check", "validate trajectories and report adjacency ranges");
  check->add_option("--input", input, "trajectory CSV");
  check->add_option("--labels", labels, "labels CSV");
  pipeline_opts(check);

  std::string how = "graph";
  auto* decomp = app.add_subcommand("decompose", "sliding-window decomposition, one JSON record per segment");
  decomp->add_option("--input", input, "trajectory CSV");
  decomp->add_option("--decomposer", how, "graph | exact");
  pipeline_opts(decomp);

  auto* feats = app.add_subcommand("features", "feature matrix CSV");
  feats->add_option("--input", input, "trajectory CSV");
  feats->add_option("--labels", labels, "labels CSV");
  pipeline_opts(feats);

  ClassifyArgs ca;
  auto* cls = app.add_subcommand("classify", "repeated stratified cross-validation of logistic regression");
  cls->add_option("--input", ca.input, "trajectory CSV");
  cls->add_option("--labels", ca.labels, "labels CSV");
  cls->add_option("--features", ca.features, "precomputed feature CSV with label column");
  cls->add_option("--odds", ca.odds, "full | per-feature | none");
  cls->add_flag("--shuffle-labels", ca.shuffle_labels, "permute labels (null baseline)");
  pipeline_opts(cls);

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "reconstruction error across epsilon, window and cutoff");
  rec->add_option("--input", ra.input, "trajectory CSV");
  rec->add_option("--epsilons", ra.epsilons, "TT-SVD tolerances")->delimiter(',');
  rec->add_option("--windows", ra.windows, "window sizes")->delimiter(',');
  rec->add_option("--cutoffs", ra.cutoffs, "low-pass cutoffs, Hz")->delimiter(',');
  rec->add_option("--max-segments", ra.max_segments, "only the first N segments");
  pipeline_opts(rec);

  for (auto* s : {synth, check, decomp, feats, cls, rec}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synth(g, o, sa, out);
    if (*check) return cmd_ingest_check(g, o, input, labels, out);
    if (*decomp) return cmd_decompose(g, o, input, how, out);
    if (*feats) return cmd_features(g, o, input, labels, out);
    if (*cls) return cmd_classify(g, o, ca, out);
    if (*rec) return cmd_reconstruct(g, o, ra, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleSpec& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"gdmd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gdmd::cli

#pragma once

// Ridge logistic regression on standardized features, ranking metrics,
// repeated stratified cross-validation and Wald odds ratios.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gdmd/numerics.hpp"

namespace gdmd {

struct LabeledDataset {
  RMatrix X;  // rows = samples
  std::vector<int> y;
  std::vector<std::string> names;

  Eigen::Index rows() const { return X.rows(); }
  std::size_t positives() const { return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1)); }

  void check() const {
    if (static_cast<Eigen::Index>(y.size()) != X.rows()) throw ContractViolation("dataset: row and label counts differ");
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X.cols()) throw ContractViolation("dataset: name count differs from columns");
    for (int v : y)
      if (v != 0 && v != 1) throw InputError("dataset: labels must be 0 or 1");
    if (!X.allFinite()) throw InputError("dataset: non-finite feature value");
  }

  LabeledDataset subset(const std::vector<Eigen::Index>& idx) const {
    LabeledDataset out{RMatrix(static_cast<Eigen::Index>(idx.size()), X.cols()), {}, names};
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.X.row(static_cast<Eigen::Index>(k)) = X.row(idx[k]);
      out.y.push_back(y[static_cast<std::size_t>(idx[k])]);
    }
    return out;
  }
};

struct LogisticModel {
  std::vector<Eigen::Index> kept;  // columns of the input that survived standardization
  std::vector<Eigen::Index> dropped;
  RVector mean, sd;                // over kept columns
  RVector w;                       // standardized weights
  double b = 0.0;
  double l2 = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  Eigen::Index n_features = 0;

  /// Weights and intercept acting on raw features (zero for dropped columns).
  std::pair<RVector, double> raw_coefficients() const {
    RVector beta = RVector::Zero(n_features);
    double b0 = b;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      beta(kept[k]) = w(kk) / sd(kk);
      b0 -= w(kk) * mean(kk) / sd(kk);
    }
    return {beta, b0};
  }
};

inline constexpr double kGradTol = 1e-6;
inline constexpr int kMaxNewtonIterations = 500;

namespace detail {

inline double sigmoid(double z) {
  const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0 - std::numeric_limits<double>::epsilon() / 2.0);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct Standardized {
  RMatrix Z;
  std::vector<Eigen::Index> kept, dropped;
  RVector mean, sd;
};

inline Standardized standardize(const RMatrix& X) {
  Standardized s;
  const double n = static_cast<double>(X.rows());
  std::vector<double> mu, sig;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double m = X.col(c).mean();
    const double v = (X.col(c).array() - m).square().sum() / n;
    const double scale = std::max(1.0, X.col(c).cwiseAbs().maxCoeff());
    if (std::sqrt(v) <= 1e-12 * scale) {
      s.dropped.push_back(c);
      continue;
    }
    s.kept.push_back(c);
    mu.push_back(m);
    sig.push_back(std::sqrt(v));
  }
  s.mean = Eigen::Map<RVector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  s.sd = Eigen::Map<RVector>(sig.data(), static_cast<Eigen::Index>(sig.size()));
  s.Z.resize(X.rows(), static_cast<Eigen::Index>(s.kept.size()));
  for (std::size_t k = 0; k < s.kept.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    s.Z.col(kk) = (X.col(s.kept[k]).array() - s.mean(kk)) / s.sd(kk);
  }
  return s;
}

/// Mean log-loss plus (l2/2)|w|^2; theta = (b, w).
inline double objective(const RMatrix& Z1, const RVector& y, const RVector& theta, double l2) {
  const RVector eta = Z1 * theta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) loss += softplus(eta(i)) - y(i) * eta(i);
  return loss / static_cast<double>(eta.size()) + 0.5 * l2 * theta.tail(theta.size() - 1).squaredNorm();
}

struct NewtonResult {
  RVector theta;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

/// Full-batch Newton with Armijo backtracking. Z1 carries a leading column of ones.
inline NewtonResult newton(const RMatrix& Z1, const RVector& y, double l2) {
  const Eigen::Index p = Z1.cols();
  const double n = static_cast<double>(Z1.rows());
  RVector penalty = RVector::Constant(p, l2);
  penalty(0) = 0.0;
  NewtonResult r{RVector::Zero(p)};
  double f = objective(Z1, y, r.theta, l2);
  for (r.iterations = 0; r.iterations < kMaxNewtonIterations; ++r.iterations) {
    const RVector eta = Z1 * r.theta;
    RVector prob(eta.size()), weight(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      prob(i) = sigmoid(eta(i));
      weight(i) = prob(i) * (1.0 - prob(i));
    }
    const RVector grad = Z1.transpose() * (prob - y) / n + penalty.cwiseProduct(r.theta);
    r.grad_norm = grad.norm();
    if (r.grad_norm <= kGradTol) {
      r.converged = true;
      break;
    }
    RMatrix hess = Z1.transpose() * weight.asDiagonal() * Z1 / n;
    hess.diagonal() += penalty;
    // keeps the step defined when the curvature collapses (separable data, l2 = 0)
    hess.diagonal().array() += 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
    const RVector step = hess.ldlt().solve(-grad);
    const double slope = grad.dot(step);
    const RVector dir = (step.allFinite() && slope < 0.0) ? step : RVector(-grad);
    const double dslope = grad.dot(dir);
    double t = 1.0;
    double f_new = f;
    RVector cand;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      cand = r.theta + t * dir;
      f_new = objective(Z1, y, cand, l2);
      if (f_new <= f + 1e-4 * t * dslope) break;
    }
    if (!(f_new <= f)) break;  // no decrease possible at machine precision
    r.theta = cand;
    const double change = f - f_new;
    f = f_new;
    if (change == 0.0) break;
  }
  return r;
}

}  // namespace detail

inline LogisticModel fit(const LabeledDataset& data, double l2) {
  data.check();
  if (data.rows() < 2) throw InputError("fit: need at least 2 rows");
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == data.y.size()) throw InputError("fit: both classes must be present");
  if (l2 < 0.0) throw ContractViolation("fit: l2 must be nonnegative");
  auto s = detail::standardize(data.X);
  if (s.kept.empty()) throw DegenerateInput("fit: every feature has zero variance");
  RMatrix Z1(data.rows(), s.Z.cols() + 1);
  Z1.col(0).setOnes();
  Z1.rightCols(s.Z.cols()) = s.Z;
  RVector y(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i) y(i) = data.y[static_cast<std::size_t>(i)];
  const auto nr = detail::newton(Z1, y, l2);
  LogisticModel m;
  m.kept = std::move(s.kept);
  m.dropped = std::move(s.dropped);
  m.mean = std::move(s.mean);
  m.sd = std::move(s.sd);
  m.b = nr.theta(0);
  m.w = nr.theta.tail(nr.theta.size() - 1);
  m.l2 = l2;
  m.iterations = nr.iterations;
  m.grad_norm = nr.grad_norm;
  m.converged = nr.converged;
  m.n_features = data.X.cols();
  return m;
}

inline double predict_proba(const LogisticModel& model, const RVector& x) {
  if (x.size() != model.n_features) throw ContractViolation("predict_proba: feature length does not match the model");
  double z = model.b;
  for (std::size_t k = 0; k < model.kept.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    z += model.w(kk) * (x(model.kept[k]) - model.mean(kk)) / model.sd(kk);
  }
  return detail::sigmoid(z);
}

inline std::vector<double> predict_proba(const LogisticModel& model, const RMatrix& X) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) out.push_back(predict_proba(model, RVector(X.row(i).transpose())));
  return out;
}

struct CurvePoint {
  double x, y;
};

struct Metrics {
  double accuracy = 0, auc = 0, f_measure = 0, precision = 0, recall = 0;
  std::vector<CurvePoint> roc;  // (fpr, tpr)
  std::vector<CurvePoint> pr;   // (recall, precision)
};

/// AUC by rank averaging (Mann-Whitney); curves sweep every distinct score.
inline Metrics evaluate(const std::vector<double>& scores, const std::vector<int>& labels, double threshold = 0.5) {
  if (scores.size() != labels.size() || scores.empty()) throw ContractViolation("evaluate: scores and labels must be nonempty and aligned");
  const std::size_t n = scores.size();
  const auto n1 = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t n0 = n - n1;
  if (n1 == 0 || n0 == 0) throw DegenerateInput("evaluate: AUC undefined with a single class");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum += avg_rank;
    i = j;
  }
  Metrics m;
  const double d1 = static_cast<double>(n1), d0 = static_cast<double>(n0);
  m.auc = (rank_sum - d1 * (d1 + 1.0) / 2.0) / (d1 * d0);

  m.roc.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = n; i > 0;) {
    const double s = scores[order[i - 1]];
    while (i > 0 && scores[order[i - 1]] == s) {
      (labels[order[i - 1]] == 1 ? tp : fp) += 1;
      --i;
    }
    m.roc.push_back({static_cast<double>(fp) / d0, static_cast<double>(tp) / d1});
    m.pr.push_back({static_cast<double>(tp) / d1, static_cast<double>(tp) / static_cast<double>(tp + fp)});
  }

  std::size_t tp5 = 0, fp5 = 0, tn5 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pred = scores[i] >= threshold;
    if (pred && labels[i] == 1) ++tp5;
    if (pred && labels[i] == 0) ++fp5;
    if (!pred && labels[i] == 0) ++tn5;
  }
  m.accuracy = static_cast<double>(tp5 + tn5) / static_cast<double>(n);
  m.precision = tp5 + fp5 > 0 ? static_cast<double>(tp5) / static_cast<double>(tp5 + fp5) : 0.0;
  m.recall = static_cast<double>(tp5) / d1;
  m.f_measure = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

struct MetricSummary {
  double mean = 0.0, sd = 0.0;
};

struct CvReport {
  std::vector<Metrics> runs;  // one per (repeat, fold)
  MetricSummary accuracy, auc, f_measure, precision, recall;
  std::vector<double> pooled_scores;  // every out-of-fold prediction, run order
  std::vector<int> pooled_labels;
};

/// Per class: shuffled indices dealt round-robin into `folds` parts.
inline std::vector<std::vector<Eigen::Index>> stratified_folds(const std::vector<int>& y, int folds, std::mt19937_64& rng) {
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(folds));
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) idx.push_back(static_cast<Eigen::Index>(i));
    if (idx.size() < static_cast<std::size_t>(folds))
      throw InputError("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) + " samples, fewer than " + std::to_string(folds) + " folds");
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) out[k % static_cast<std::size_t>(folds)].push_back(idx[k]);
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

inline CvReport cross_validate(const LabeledDataset& data, double l2, int repeats, int folds, std::uint64_t seed) {
  data.check();
  if (repeats < 1 || folds < 2) throw ContractViolation("cross_validate: need repeats >= 1 and folds >= 2");
  std::mt19937_64 rng(seed);
  CvReport rep;
  for (int r = 0; r < repeats; ++r) {
    const auto parts = stratified_folds(data.y, folds, rng);
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> train;
      for (int g = 0; g < folds; ++g)
        if (g != f) train.insert(train.end(), parts[static_cast<std::size_t>(g)].begin(), parts[static_cast<std::size_t>(g)].end());
      std::sort(train.begin(), train.end());
      const auto test = data.subset(parts[static_cast<std::size_t>(f)]);
      const auto model = fit(data.subset(train), l2);
      const auto scores = predict_proba(model, test.X);
      rep.runs.push_back(evaluate(scores, test.y));
      rep.pooled_scores.insert(rep.pooled_scores.end(), scores.begin(), scores.end());
      rep.pooled_labels.insert(rep.pooled_labels.end(), test.y.begin(), test.y.end());
    }
  }
  auto summarize = [&](double Metrics::*field) {
    MetricSummary s;
    const double n = static_cast<double>(rep.runs.size());
    for (const auto& m : rep.runs) s.mean += m.*field / n;
    double v = 0.0;
    for (const auto& m : rep.runs) v += (m.*field - s.mean) * (m.*field - s.mean);
    s.sd = rep.runs.size() > 1 ? std::sqrt(v / (n - 1.0)) : 0.0;
    return s;
  };
  rep.accuracy = summarize(&Metrics::accuracy);
  rep.auc = summarize(&Metrics::auc);
  rep.f_measure = summarize(&Metrics::f_measure);
  rep.precision = summarize(&Metrics::precision);
  rep.recall = summarize(&Metrics::recall);
  return rep;
}

struct OddsRatio {
  std::string name;
  bool estimable = false;
  double odds_ratio = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  bool separation = false;  // fit did not converge or training data perfectly separated
};

enum class OddsMode { full_model, per_feature };

namespace detail {

inline bool perfectly_separated(const LogisticModel& m, const LabeledDataset& d) {
  const auto p = predict_proba(m, d.X);
  for (std::size_t i = 0; i < p.size(); ++i)
    if ((p[i] >= 0.5) != (d.y[i] == 1)) return false;
  return true;
}

/// Unregularized fit; Wald statistics for every input column.
inline std::vector<OddsRatio> wald(const LabeledDataset& data) {
  const auto model = fit(data, 0.0);
  const bool separated = !model.converged || perfectly_separated(model, data);
  std::vector<OddsRatio> out(static_cast<std::size_t>(data.X.cols()));
  for (std::size_t c = 0; c < out.size(); ++c) out[c].name = data.names.empty() ? "x" + std::to_string(c) : data.names[c];

  const Eigen::Index k = static_cast<Eigen::Index>(model.kept.size());
  RMatrix Z1(data.rows(), k + 1);
  Z1.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j)
    Z1.col(j + 1) = (data.X.col(model.kept[static_cast<std::size_t>(j)]).array() - model.mean(j)) / model.sd(j);
  RVector theta(k + 1);
  theta << model.b, model.w;
  const RVector eta = Z1 * theta;
  RVector weight(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) weight(i) = sigmoid(eta(i)) * (1.0 - sigmoid(eta(i)));
  const RMatrix info = Z1.transpose() * weight.asDiagonal() * Z1;

  Eigen::SelfAdjointEigenSolver<RMatrix> es(info);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  const bool singular = !(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top;
  if (singular) {
    for (auto& o : out) o.separation = separated;
    return out;
  }
  const RMatrix cov = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  for (Eigen::Index j = 0; j < k; ++j) {
    auto& o = out[static_cast<std::size_t>(model.kept[static_cast<std::size_t>(j)])];
    const double beta = model.w(j) / model.sd(j);
    const double se = std::sqrt(cov(j + 1, j + 1)) / model.sd(j);
    o.estimable = std::isfinite(beta) && std::isfinite(se) && se > 0.0;
    o.separation = separated;
    if (!o.estimable) continue;
    o.odds_ratio = std::exp(beta);
    o.ci_low = std::exp(beta - 1.96 * se);
    o.ci_high = std::exp(beta + 1.96 * se);
    o.p_value = std::erfc(std::abs(beta / se) / std::numbers::sqrt2);
  }
  return out;
}

}  // namespace detail

/// Odds ratio, two-sided Wald p and 95% CI per feature from unregularized fits.
inline std::vector<OddsRatio> odds_ratios(const LabeledDataset& data, OddsMode mode = OddsMode::full_model) {
  data.check();
  if (mode == OddsMode::full_model) return detail::wald(data);
  std::vector<OddsRatio> out;
  for (Eigen::Index c = 0; c < data.X.cols(); ++c) {
    LabeledDataset one{data.X.col(c), data.y, {data.names.empty() ? "x" + std::to_string(c) : data.names[static_cast<std::size_t>(c)]}};
    try {
      out.push_back(detail::wald(one).front());
    } catch (const DegenerateInput&) {
      out.push_back({one.names.front()});
    }
  }
  return out;
}

}  // namespace gdmd

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "gdmd/classify.hpp"

using namespace gdmd;

namespace {

LabeledDataset make(const std::vector<std::vector<double>>& rows, const std::vector<int>& y) {
  LabeledDataset d;
  d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  d.y = y;
  return d;
}

double train_accuracy(const LogisticModel& m, const LabeledDataset& d) {
  const auto p = predict_proba(m, d.X);
  int ok = 0;
  for (std::size_t i = 0; i < p.size(); ++i) ok += ((p[i] >= 0.5) == (d.y[i] == 1)) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(p.size());
}

/// Logistic data with one predictor x ~ N(0,1) and P(y=1) = sigmoid(b0 + b1 x).
LabeledDataset logistic_sample(std::mt19937_64& rng, int n, double b0, double b1) {
  std::normal_distribution<double> nx(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledDataset d;
  d.X.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const double x = nx(rng);
    d.X(i, 0) = x;
    d.y.push_back(u(rng) < 1.0 / (1.0 + std::exp(-(b0 + b1 * x))) ? 1 : 0);
  }
  d.names = {"x"};
  return d;
}

}  // namespace

TEST(Fit, SeparableOneDimensional) {
  const auto d = make({{-3}, {-2}, {-1}, {-0.5}, {0.5}, {1}, {2}, {3}}, {0, 0, 0, 0, 1, 1, 1, 1});
  const auto m = fit(d, 1e-4);
  EXPECT_DOUBLE_EQ(train_accuracy(m, d), 1.0);
  EXPECT_TRUE(m.w.allFinite());
  EXPECT_TRUE(std::isfinite(m.b));
  EXPECT_TRUE(m.converged);
  EXPECT_LE(m.grad_norm, 1e-6);
}

TEST(Fit, ConstantFeatureDroppedAndInterceptIsLogOdds) {
  // second column takes +-1 equally often within each class, so it carries no signal
  const auto d = make({{5, 1}, {5, -1}, {5, 1}, {5, -1}, {5, 1}, {5, -1}, {5, 1}, {5, -1}, {5, 1}, {5, -1}},
                      {1, 1, 1, 1, 1, 1, 0, 0, 0, 0});
  const auto m = fit(d, 1e-4);
  ASSERT_EQ(m.dropped, (std::vector<Eigen::Index>{0}));
  ASSERT_EQ(m.kept, (std::vector<Eigen::Index>{1}));
  EXPECT_NEAR(m.b, std::log(0.6 / 0.4), 1e-3);
  EXPECT_NEAR(m.w(0), 0.0, 1e-9);
}

TEST(Fit, XorIsNotLinearlySeparable) {
  const auto d = make({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {0, 0, 1, 1});
  EXPECT_LE(train_accuracy(fit(d, 1e-4), d), 0.75);
}

TEST(Fit, Errors) {
  EXPECT_THROW(fit(make({{1}, {2}, {3}}, {1, 1, 1}), 1e-4), InputError);
  EXPECT_THROW(fit(make({{1}, {1}, {1}}, {1, 0, 1}), 1e-4), DegenerateInput);
  EXPECT_THROW(fit(make({{1}}, {1}), 1e-4), InputError);
}

TEST(Fit, DeterministicRefit) {
  std::mt19937_64 rng(3);
  const auto d = logistic_sample(rng, 300, 0.2, 1.0);
  const auto a = fit(d, 1e-2), b = fit(d, 1e-2);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.b, b.b);
}

TEST(Fit, StandardizedEqualsBackTransformed) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(3.0, 2.0);
  LabeledDataset d;
  d.X.resize(60, 3);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) d.X(i, j) = n(rng) * (j + 1);
    d.y.push_back(d.X(i, 0) + 0.3 * d.X(i, 2) + n(rng) > 5.0 ? 1 : 0);
  }
  const auto m = fit(d, 1e-3);
  const auto [beta, b0] = m.raw_coefficients();
  for (int i = 0; i < 60; ++i) {
    const double z = b0 + d.X.row(i).dot(beta);
    EXPECT_NEAR(predict_proba(m, RVector(d.X.row(i).transpose())), 1.0 / (1.0 + std::exp(-z)), 1e-10);
  }
}

TEST(PredictProba, HandSetModels) {
  LogisticModel m;
  m.n_features = 2;
  m.kept = {0, 1};
  m.mean = RVector::Zero(2);
  m.sd = RVector::Ones(2);
  m.w = RVector::Zero(2);
  m.b = 0.0;
  EXPECT_DOUBLE_EQ(predict_proba(m, RVector(RVector::Constant(2, 7.0))), 0.5);

  m.b = 1e6;
  const double p = predict_proba(m, RVector(RVector::Zero(2)));
  EXPECT_LT(p, 1.0);
  EXPECT_GT(p, 0.999);

  m.b = -0.3;
  m.w << 0.7, -1.2;
  m.mean << 1.0, 2.0;
  m.sd << 2.0, 0.5;
  RVector x(2);
  x << 2.5, 1.0;
  const double z = -0.3 + 0.7 * (2.5 - 1.0) / 2.0 - 1.2 * (1.0 - 2.0) / 0.5;
  EXPECT_NEAR(predict_proba(m, x), 1.0 / (1.0 + std::exp(-z)), 1e-12);
  EXPECT_THROW(predict_proba(m, RVector(RVector::Zero(3))), ContractViolation);
}

TEST(Evaluate, AucCases) {
  EXPECT_DOUBLE_EQ(evaluate({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}).auc, 1.0);
  EXPECT_DOUBLE_EQ(evaluate({0.4, 0.4, 0.4, 0.4}, {0, 1, 0, 1}).auc, 0.5);
  EXPECT_DOUBLE_EQ(evaluate({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}).auc, 0.75);
  EXPECT_THROW(evaluate({0.1, 0.2}, {1, 1}), DegenerateInput);
}

TEST(Evaluate, AucMatchesPairCount) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> bucket(0, 6), coin(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
      s.push_back(bucket(rng) / 6.0);
      y.push_back(coin(rng));
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (y[i] == 1 && y[j] == 0) {
          pairs += 1;
          wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    const auto m = evaluate(s, y);
    EXPECT_NEAR(m.auc, wins / pairs, 1e-12);
    // strictly increasing transform leaves AUC alone
    std::vector<double> t;
    for (double v : s) t.push_back(std::exp(3 * v) - 10);
    EXPECT_DOUBLE_EQ(evaluate(t, y).auc, m.auc);
  }
}

TEST(Evaluate, ThresholdMetricsAndCurves) {
  // threshold 0.5: TP 2, FP 1, FN 1, TN 2
  const auto m = evaluate({0.9, 0.7, 0.2, 0.6, 0.1, 0.3}, {1, 1, 1, 0, 0, 0});
  EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f_measure, m.precision);
  EXPECT_DOUBLE_EQ(m.accuracy, 4.0 / 6.0);
  EXPECT_EQ(m.roc.front().x, 0.0);
  EXPECT_EQ(m.roc.front().y, 0.0);
  EXPECT_EQ(m.roc.back().x, 1.0);
  EXPECT_EQ(m.roc.back().y, 1.0);
  EXPECT_EQ(m.pr.size(), 6u);
  double area = 0.0;
  for (std::size_t k = 1; k < m.roc.size(); ++k) area += (m.roc[k].x - m.roc[k - 1].x) * (m.roc[k].y + m.roc[k - 1].y) / 2;
  EXPECT_NEAR(area, m.auc, 1e-12);
}

TEST(CrossValidate, StratifiedFoldSizes) {
  std::vector<int> y(23, 0);
  for (int i = 0; i < 11; ++i) y[static_cast<std::size_t>(i)] = 1;
  std::mt19937_64 rng(1);
  const auto folds = stratified_folds(y, 5, rng);
  std::set<Eigen::Index> seen;
  for (int cls : {0, 1}) {
    std::vector<int> sizes;
    for (const auto& f : folds) {
      int c = 0;
      for (auto i : f) c += y[static_cast<std::size_t>(i)] == cls ? 1 : 0;
      sizes.push_back(c);
    }
    EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1);
  }
  for (const auto& f : folds) seen.insert(f.begin(), f.end());
  EXPECT_EQ(seen.size(), 23u);
  std::vector<int> tiny{1, 1, 1, 0, 0, 0, 0, 0};
  EXPECT_THROW(stratified_folds(tiny, 5, rng), InputError);
}

TEST(CrossValidate, TwentyFiveDeterministicEvaluations) {
  std::mt19937_64 rng(6);
  const auto d = logistic_sample(rng, 200, 0.0, 2.0);
  const auto a = cross_validate(d, 1e-4, 5, 5, 42);
  const auto b = cross_validate(d, 1e-4, 5, 5, 42);
  EXPECT_EQ(a.runs.size(), 25u);
  EXPECT_EQ(a.auc.mean, b.auc.mean);
  EXPECT_EQ(a.accuracy.sd, b.accuracy.sd);
  EXPECT_EQ(a.pooled_scores, b.pooled_scores);
  EXPECT_EQ(a.pooled_scores.size(), 5u * 200u);
  EXPECT_GT(a.auc.mean, 0.75);
}

TEST(CrossValidate, ShuffledLabelsNearChance) {
  std::mt19937_64 rng(7);
  auto d = logistic_sample(rng, 200, 0.0, 2.0);
  std::shuffle(d.y.begin(), d.y.end(), rng);
  const auto r = cross_validate(d, 1e-4, 5, 5, 9);
  std::cout << "shuffled-label mean AUC " << r.auc.mean << "\n";
  EXPECT_GE(r.auc.mean, 0.0);
  EXPECT_LE(r.auc.mean, 1.0);
}

TEST(OddsRatios, NullEffect) {
  // x symmetric within each class: beta = 0 exactly
  const auto d = make({{1}, {-1}, {2}, {-2}, {1}, {-1}, {0.5}, {-0.5}}, {1, 1, 1, 1, 0, 0, 0, 0});
  const auto o = odds_ratios(d);
  ASSERT_TRUE(o[0].estimable);
  EXPECT_NEAR(o[0].odds_ratio, 1.0, 1e-9);
  EXPECT_LT(o[0].ci_low, 1.0);
  EXPECT_GT(o[0].ci_high, 1.0);
  EXPECT_NEAR(o[0].p_value, 1.0, 1e-6);
}

TEST(OddsRatios, KnownCoefficientRecovered) {
  for (auto mode : {OddsMode::full_model, OddsMode::per_feature}) {
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(2024 + seed);
      const auto o = odds_ratios(logistic_sample(rng, 5000, -0.3, 1.5), mode);
      ASSERT_TRUE(o[0].estimable);
      EXPECT_GE(o[0].odds_ratio, std::exp(1.3));
      EXPECT_LE(o[0].odds_ratio, std::exp(1.7));
      EXPECT_LT(o[0].p_value, 1e-10);
      EXPECT_FALSE(o[0].separation);
      covered += (o[0].ci_low <= std::exp(1.5) && std::exp(1.5) <= o[0].ci_high) ? 1 : 0;
    }
    // nominal 95%; 16 of 20 leaves room for sampling error
    EXPECT_GE(covered, 16);
  }
}

TEST(OddsRatios, SeparationFlagged) {
  const auto d = make({{-3}, {-2}, {-1}, {1}, {2}, {3}}, {0, 0, 0, 1, 1, 1});
  const auto o = odds_ratios(d);
  EXPECT_TRUE(o[0].separation);
  if (o[0].estimable) {
    EXPECT_GT(o[0].odds_ratio, 1e3);
    EXPECT_GT(o[0].ci_high / o[0].ci_low, 1e3);
  }
}

TEST(OddsRatios, CollinearColumnsNotEstimable) {
  std::mt19937_64 rng(12);
  auto d = logistic_sample(rng, 200, 0.0, 1.0);
  RMatrix x(200, 2);
  x.col(0) = d.X.col(0);
  x.col(1) = 2.0 * d.X.col(0);
  d.X = x;
  d.names = {"a", "b"};
  const auto o = odds_ratios(d);
  EXPECT_FALSE(o[0].estimable);
  EXPECT_FALSE(o[1].estimable);
  const auto each = odds_ratios(d, OddsMode::per_feature);
  EXPECT_TRUE(each[0].estimable);
  EXPECT_TRUE(each[1].estimable);
  EXPECT_NEAR(std::log(each[1].odds_ratio) * 2.0, std::log(each[0].odds_ratio), 1e-6);
}

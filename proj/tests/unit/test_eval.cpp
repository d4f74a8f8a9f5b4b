#include "sentinel/error.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/folds.hpp"
#include "sentinel/rng.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

using namespace sentinel;

namespace {

std::vector<DatasetRecord> separable(std::size_t n_b, std::size_t n_m) {
  std::vector<DatasetRecord> out;
  Rng rng(17);
  for (std::size_t i = 0; i < n_b + n_m; ++i) {
    DatasetRecord r;
    r.id = "p" + std::to_string(i);
    r.label = i < n_m ? Label::Malicious : Label::Benign;
    bool mal = r.label == Label::Malicious;
    r.structured[2] = mal;
    r.structured[4] = rng.bernoulli(0.5);
    r.tokens = {"setup", mal ? "exec" : "requests"};
    out.push_back(r);
  }
  return out;
}

} // namespace

TEST(Metrics, WorkedExample) {
  auto m = compute_metrics(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 0, 0});
  EXPECT_NEAR(m.malicious.precision, 1.0, 1e-12);
  EXPECT_NEAR(m.malicious.recall, 0.5, 1e-12);
  EXPECT_NEAR(m.malicious.f1, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(m.benign.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.benign.f1, 0.8, 1e-12);
  EXPECT_NEAR(m.overall.f1, (2.0 / 3.0 + 0.8) / 2, 1e-12);
  EXPECT_EQ(m.support_malicious, 2u);
  EXPECT_EQ(m.support_benign, 2u);
}

TEST(Metrics, ZeroDenominatorsAndErrors) {
  auto m = compute_metrics(std::vector<int>{0, 0}, std::vector<int>{0, 0});
  EXPECT_EQ(m.malicious.precision, 0.0);
  EXPECT_EQ(m.malicious.f1, 0.0);
  EXPECT_EQ(m.benign.f1, 1.0);
  EXPECT_THROW(compute_metrics(std::vector<int>{1}, std::vector<int>{}), Error);
  EXPECT_THROW(compute_metrics(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST(Folds, StratifiedDisjointCovering) {
  std::vector<int> y(50, 0);
  for (int i = 0; i < 10; ++i) y[i * 5] = 1;
  auto folds = stratified_k_fold(y, 5, 3);
  ASSERT_EQ(folds.size(), 5u);
  std::vector<int> seen(50, 0);
  for (const auto& f : folds) {
    EXPECT_EQ(f.size(), 10u);
    int pos = 0;
    for (auto i : f) {
      ++seen[i];
      pos += y[i];
    }
    EXPECT_EQ(pos, 2);
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_EQ(stratified_k_fold(y, 5, 3), folds);
  EXPECT_NE(stratified_k_fold(y, 5, 4), folds);
  auto rest = fold_complement(50, folds[0]);
  EXPECT_EQ(rest.size(), 40u);
}

TEST(Folds, Errors) {
  std::vector<int> y{0, 0, 0, 1, 1};
  EXPECT_THROW(stratified_k_fold(y, 1, 0), Error);
  try {
    stratified_k_fold(y, 3, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClassTooSmall);
  }
}

TEST(EvaluateCv, RunsAndAverages) {
  auto data = separable(30, 10);
  PipelineConfig pc;
  pc.kind = ModelKind::BernoulliNb;
  auto rep = evaluate_cv(data, pc, 5, 2, 1);
  EXPECT_EQ(rep.folds.size(), 10u);
  EXPECT_NEAR(rep.averaged.overall.f1, 1.0, 1e-12);
  EXPECT_EQ(rep.averaged.support_malicious, 10u);
  auto json = nlohmann::json::parse(cv_report_json(rep));
  EXPECT_EQ(json["per_fold"].size(), 10u);
  EXPECT_TRUE(json["importance"].is_null());
  EXPECT_EQ(cv_report_json(rep), cv_report_json(evaluate_cv(data, pc, 5, 2, 1)));
  EXPECT_THROW(evaluate_cv(data, pc, 11, 1, 1), Error);
}

TEST(EvaluateCv, HooksSeeEveryFold) {
  auto data = separable(30, 10);
  PipelineConfig pc;
  std::size_t calls = 0;
  CvHooks hooks;
  hooks.on_vocabulary = [&](std::size_t, std::size_t, const Vocabulary& v) {
    ++calls;
    EXPECT_TRUE(v.contains("setup"));
  };
  hooks.learner = [](const ml::Matrix& xt, std::span<const int> yt, const ml::Matrix& xs) {
    EXPECT_EQ(xt.rows(), yt.size());
    return std::vector<int>(xs.rows(), 1);
  };
  auto rep = evaluate_cv(data, pc, 4, 3, 2, hooks);
  EXPECT_EQ(calls, 12u);
  EXPECT_NEAR(rep.averaged.malicious.recall, 1.0, 1e-12);
}

TEST(Importance, InformativeColumnRanksFirst) {
  auto data = separable(40, 20);
  auto model = train_model(data, ModelKind::DecisionTree, FeatureSet::Structured, Hyperparams{}, ExtractionConfig{}, 1);
  auto rep = permutation_importance(model, data, 5, 3);
  ASSERT_EQ(rep.features.size(), kStructuredCount);
  EXPECT_EQ(rep.features[0].name, "install_command");
  EXPECT_GT(rep.features[0].mean_delta, 0.3);
  EXPECT_NEAR(rep.baseline, 1.0, 1e-12);
  for (std::size_t i = 1; i < rep.features.size(); ++i) {
    EXPECT_GE(rep.features[i - 1].mean_delta, rep.features[i].mean_delta);
  }
  auto one = permutation_importance(model, data, 1, 3);
  for (const auto& f : one.features) EXPECT_EQ(f.std_delta, 0.0);
  EXPECT_THROW(permutation_importance(model, data, 0, 3), Error);
  auto json = nlohmann::json::parse(importance_report_json(rep));
  EXPECT_EQ(json["importance"]["features"].size(), kStructuredCount);
}

TEST(Importance, TokenColumnsIncluded) {
  auto data = separable(20, 10);
  auto model = train_model(data, ModelKind::BernoulliNb, FeatureSet::Combined, Hyperparams{}, ExtractionConfig{}, 1);
  auto rep = permutation_importance(model, data, 2, 3, 2);
  EXPECT_EQ(rep.features.size(), kStructuredCount + 2);
  EXPECT_FALSE(format_metrics_text(compute_metrics(std::vector<int>{1, 0}, std::vector<int>{1, 0})).empty());
}

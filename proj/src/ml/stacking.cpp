#include "sentinel/error.hpp"
#include "sentinel/folds.hpp"
#include "sentinel/ml/learners.hpp"

#include <algorithm>
#include <string>

namespace sentinel::ml {

namespace {

constexpr std::uint64_t kStackTag = 0x5354;

std::uint64_t learner_seed(std::uint64_t seed, std::size_t round, BaseLearner learner) {
  return derive_seed(seed, {kStackTag, round, static_cast<std::uint64_t>(learner)});
}

struct Bases {
  RandomForest rf;
  LinearSvm svm;
  Mlp mlp;
  DecisionTree dt;
  BernoulliNb nb;

  std::array<double, kBaseLearnerCount> scores(std::span<const double> x) const {
    return {rf.score(x), svm.score(x), mlp.score(x), dt.score(x), nb.score(x)};
  }
};

Bases fit_bases(const Matrix& x, std::span<const int> y, const StackingOptions& opts, std::uint64_t seed,
                std::size_t round) {
  Bases b;
  b.rf = RandomForest::fit(x, y, opts.forest, learner_seed(seed, round, BaseLearner::RandomForest));
  b.svm = LinearSvm::fit(x, y, opts.svm, learner_seed(seed, round, BaseLearner::LinearSvm));
  b.mlp = Mlp::fit(x, y, opts.mlp, learner_seed(seed, round, BaseLearner::Mlp));
  b.dt = DecisionTree::fit(x, y, opts.tree);
  b.nb = BernoulliNb::fit(x, y, opts.nb_alpha);
  return b;
}

} // namespace

Stacking Stacking::fit(const Matrix& x, std::span<const int> y, const StackingOptions& opts, std::uint64_t seed) {
  check_training_data(x, y);
  if (x.rows() < 10) {
    throw Error(ErrorCode::TooFewExamples, "stacking needs at least 10 examples, got " + std::to_string(x.rows()));
  }
  std::size_t minority = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  minority = std::min(minority, y.size() - minority);
  const std::size_t k = std::min(opts.inner_folds, minority);
  if (k < 2) {
    throw Error(ErrorCode::TooFewExamples, "stacking needs at least two examples of each class");
  }

  auto folds = stratified_k_fold(y, k, derive_seed(seed, {kStackTag, 0xF01D}));
  Matrix meta_x(x.rows(), kBaseLearnerCount);
  for (std::size_t f = 0; f < k; ++f) {
    auto train = fold_complement(x.rows(), folds[f]);
    std::vector<int> ytrain;
    for (auto i : train) {
      ytrain.push_back(y[i]);
    }
    Bases b = fit_bases(x.select(train), ytrain, opts, seed, f);
    for (auto i : folds[f]) {
      auto s = b.scores(x.row(i));
      for (std::size_t j = 0; j < kBaseLearnerCount; ++j) {
        meta_x.set(i, j, s[j]);
      }
    }
  }

  Stacking st;
  st.meta_ = LogisticRegression::fit(meta_x, y, opts.meta);
  Bases full = fit_bases(x, y, opts, seed, k);
  st.rf_ = std::move(full.rf);
  st.svm_ = std::move(full.svm);
  st.mlp_ = std::move(full.mlp);
  st.dt_ = std::move(full.dt);
  st.nb_ = std::move(full.nb);
  st.inner_folds_used_ = k;
  return st;
}

std::array<double, kBaseLearnerCount> Stacking::base_scores(std::span<const double> x) const {
  return {rf_.score(x), svm_.score(x), mlp_.score(x), dt_.score(x), nb_.score(x)};
}

double Stacking::combine(std::span<const double> base_scores) const {
  if (base_scores.size() != kBaseLearnerCount) {
    throw Error(ErrorCode::WidthMismatch, "stacking expects five base scores");
  }
  return meta_.score(base_scores);
}

double Stacking::score(std::span<const double> x) const {
  auto s = base_scores(x);
  return combine(s);
}

void Stacking::write(ByteWriter& w) const {
  w.u32(static_cast<std::uint32_t>(inner_folds_used_));
  rf_.write(w);
  svm_.write(w);
  mlp_.write(w);
  dt_.write(w);
  nb_.write(w);
  meta_.write(w);
}

Stacking Stacking::read(ByteReader& r) {
  Stacking st;
  st.inner_folds_used_ = r.u32();
  st.rf_ = RandomForest::read(r);
  st.svm_ = LinearSvm::read(r);
  st.mlp_ = Mlp::read(r);
  st.dt_ = DecisionTree::read(r);
  st.nb_ = BernoulliNb::read(r);
  st.meta_ = LogisticRegression::read(r);
  if (st.meta_.weights().size() != kBaseLearnerCount) {
    throw Error(ErrorCode::Corrupt, "stacking meta-learner has the wrong width");
  }
  return st;
}

} // namespace sentinel::ml

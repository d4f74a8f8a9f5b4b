#include "sentinel/error.hpp"
#include "sentinel/ml/learners.hpp"
#include "sentinel/rng.hpp"

#include <cmath>

#include <gtest/gtest.h>

using namespace sentinel;
using namespace sentinel::ml;

namespace {

struct Data {
  Matrix x;
  std::vector<int> y;
};

/// Two noisy clusters separated along the first two columns.
Data blobs(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  Data out;
  for (std::size_t i = 0; i < n; ++i) {
    int label = static_cast<int>(i % 2);
    std::vector<double> r(d);
    for (auto& v : r) v = rng.uniform(-0.5, 0.5);
    r[0] += label ? 1.5 : -1.5;
    r[1] += label ? 1.0 : -1.0;
    rows.push_back(r);
    out.y.push_back(label);
  }
  out.x = Matrix::from_rows(rows);
  return out;
}

template <class Model> double accuracy(const Model& m, const Data& d) {
  std::size_t ok = 0;
  for (std::size_t r = 0; r < d.x.rows(); ++r) ok += (m.score(d.x.row(r)) >= 0.5) == (d.y[r] == 1);
  return double(ok) / double(d.x.rows());
}

template <class Model> Model round_trip(const Model& m) {
  ByteWriter w;
  m.write(w);
  ByteReader r(w.bytes());
  auto back = Model::read(r);
  EXPECT_TRUE(r.done());
  return back;
}

} // namespace

TEST(Matrix, TracksNonzeros) {
  Matrix m(2, 3);
  m.set(0, 2, 1.0);
  m.set(0, 0, 2.0);
  m.set(0, 2, 0.0);
  EXPECT_EQ(m.nonzeros(0), (std::vector<std::uint32_t>{0}));
  EXPECT_TRUE(m.nonzeros(1).empty());
  EXPECT_THROW(Matrix::from_rows({{1, 2}, {1}}), Error);
  auto s = Matrix::from_rows({{1}, {2}, {3}}).select(std::vector<std::size_t>{2, 0});
  EXPECT_EQ(s.at(0, 0), 3);
  EXPECT_EQ(s.at(1, 0), 1);
}

TEST(TrainingData, Validation) {
  auto x = Matrix::from_rows({{0}, {1}});
  EXPECT_THROW(check_training_data(x, std::vector<int>{1, 1}), Error);
  EXPECT_THROW(check_training_data(x, std::vector<int>{1}), Error);
  EXPECT_NO_THROW(check_training_data(x, std::vector<int>{0, 1}));
}

TEST(DecisionTree, LearnsXor) {
  auto x = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  std::vector<int> y{0, 1, 1, 0};
  auto t = DecisionTree::fit(x, y, TreeOptions{});
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(t.score(x.row(r)), y[r]);
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_EQ(round_trip(t), t);
  TreeOptions stump;
  stump.max_depth = 1;
  EXPECT_EQ(DecisionTree::fit(x, y, stump).depth(), 1u);
}

TEST(DecisionTree, WeightsActAsMultiplicities) {
  auto x = Matrix::from_rows({{0}, {1}, {2}});
  std::vector<int> y{0, 1, 1};
  std::vector<std::uint32_t> w{2, 0, 1};
  auto t = DecisionTree::fit(x, y, TreeOptions{}, w);
  EXPECT_EQ(t.score(std::vector<double>{0}), 0.0);
  EXPECT_EQ(t.score(std::vector<double>{2}), 1.0);
}

TEST(RandomForest, DeterministicAndAccurate) {
  auto d = blobs(80, 5, 3);
  ForestOptions o;
  auto a = RandomForest::fit(d.x, d.y, o, 9);
  auto b = RandomForest::fit(d.x, d.y, o, 9);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.trees().size(), 12u);
  EXPECT_GE(accuracy(a, d), 0.95);
  EXPECT_EQ(round_trip(a), a);
}

TEST(BernoulliNb, MatchesHandComputation) {
  auto x = Matrix::from_rows({{1, 0}, {1, 1}, {0, 1}});
  std::vector<int> y{1, 1, 0};
  auto nb = BernoulliNb::fit(x, y, 1.0);
  EXPECT_DOUBLE_EQ(nb.prior(1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(nb.feature_prob(1)[0], 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(nb.feature_prob(0)[0], 1.0 / 3.0);
  std::vector<double> q{1, 0};
  double l1 = 2.0 / 3 * 0.75 * 0.5;
  double l0 = 1.0 / 3 * (1.0 / 3) * (1 - 2.0 / 3);
  EXPECT_NEAR(nb.score(q), l1 / (l0 + l1), 1e-12);
  EXPECT_EQ(round_trip(nb), nb);
  EXPECT_THROW(BernoulliNb::fit(x, y, 0.0), Error);
}

TEST(LinearSvm, SeparatesBlobs) {
  auto d = blobs(100, 4, 5);
  auto svm = LinearSvm::fit(d.x, d.y, SvmOptions{}, 1);
  EXPECT_GE(accuracy(svm, d), 0.97);
  EXPECT_LT(svm.hinge_loss(d.x, d.y), 0.3);
  EXPECT_GT(svm.weights()[0], 0.0);
  EXPECT_EQ(round_trip(svm), svm);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  auto d = blobs(6, 4, 7);
  auto net = Mlp::initialize(4, 3, 11);
  std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5};
  std::vector<double> grad;
  net.loss(d.x, d.y, rows, &grad);
  auto p = net.parameters();
  ASSERT_EQ(p.size(), 4u * 3 + 3 + 3 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto probe = net;
    auto q = p;
    q[k] += 1e-6;
    probe.set_parameters(q);
    double up = probe.loss(d.x, d.y, rows, nullptr);
    q[k] -= 2e-6;
    probe.set_parameters(q);
    double down = probe.loss(d.x, d.y, rows, nullptr);
    EXPECT_NEAR(grad[k], (up - down) / 2e-6, 1e-6);
  }
}

TEST(Mlp, LearnsBlobs) {
  auto d = blobs(80, 4, 8);
  MlpOptions o;
  o.hidden_units = 8;
  o.epochs = 100;
  auto net = Mlp::fit(d.x, d.y, o, 4);
  EXPECT_GE(accuracy(net, d), 0.95);
  EXPECT_EQ(round_trip(net), net);
  EXPECT_EQ(Mlp::fit(d.x, d.y, o, 4), net);
}

TEST(LogisticRegression, SeparatesBlobs) {
  auto d = blobs(60, 3, 9);
  auto lr = LogisticRegression::fit(d.x, d.y, LogisticOptions{});
  EXPECT_GE(accuracy(lr, d), 0.97);
  EXPECT_EQ(round_trip(lr), lr);
}

TEST(Stacking, CombinesBaseLearners) {
  auto d = blobs(60, 4, 10);
  StackingOptions o;
  o.mlp.epochs = 50;
  auto s = Stacking::fit(d.x, d.y, o, 2);
  EXPECT_EQ(s.inner_folds_used(), 5u);
  EXPECT_GE(accuracy(s, d), 0.95);
  auto base = s.base_scores(d.x.row(0));
  EXPECT_DOUBLE_EQ(s.combine(base), s.score(d.x.row(0)));
  EXPECT_EQ(round_trip(s), s);
  auto tiny = blobs(8, 2, 1);
  EXPECT_THROW(Stacking::fit(tiny.x, tiny.y, o, 1), Error);
}

TEST(Logistic, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(logistic(0), 0.5);
  EXPECT_GT(logistic(800), 0.999);
  EXPECT_LT(logistic(-800), 1e-300 + 1e-12);
  EXPECT_FALSE(std::isnan(logistic(-800)));
}

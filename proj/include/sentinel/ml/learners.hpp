#pragma once

#include "sentinel/rng.hpp"
#include "sentinel/serial.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sentinel::ml {

/// Dense row-major design matrix that also remembers each row's nonzero columns.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, double v);
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  const std::vector<std::uint32_t>& nonzeros(std::size_t r) const noexcept { return nz_[r]; }
  /// Rows picked by index, in the given order.
  Matrix select(std::span<const std::size_t> rows) const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<std::vector<std::uint32_t>> nz_;
};

/// Labels are 0 (benign) or 1 (malicious). Throws Error(SingleClassData) or
/// Error(LengthMismatch) when the data cannot be fitted.
void check_training_data(const Matrix& x, std::span<const int> y);

// ---------------------------------------------------------------------------

struct TreeOptions {
  std::size_t max_depth = 15; ///< 0 means unlimited
  std::size_t min_samples_split = 2;
  /// Candidate features per split; 0 means all features in index order.
  std::size_t max_features = 0;
};

class DecisionTree {
public:
  struct Node {
    std::int32_t feature = -1; ///< -1 for a leaf
    double threshold = 0.0;    ///< go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double score = 0.0; ///< malicious fraction at the node

    bool operator==(const Node&) const = default;
  };

  /// Sample weights are integer multiplicities (bootstrap counts); empty means all 1.
  /// `rng` is required when opts.max_features > 0.
  static DecisionTree fit(const Matrix& x, std::span<const int> y, const TreeOptions& opts,
                          std::span<const std::uint32_t> weights = {}, Rng* rng = nullptr);

  double score(std::span<const double> x) const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

  void write(ByteWriter& w) const;
  static DecisionTree read(ByteReader& r);
  bool operator==(const DecisionTree&) const = default;

private:
  std::vector<Node> nodes_;
};

struct ForestOptions {
  std::size_t n_trees = 12;
  std::size_t max_depth = 0;
  bool bootstrap = true;
  /// Candidate features per split; 0 means floor(sqrt(d)), at least 1.
  std::size_t max_features = 0;
};

class RandomForest {
public:
  static RandomForest fit(const Matrix& x, std::span<const int> y, const ForestOptions& opts, std::uint64_t seed);

  double score(std::span<const double> x) const;
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  void write(ByteWriter& w) const;
  static RandomForest read(ByteReader& r);
  bool operator==(const RandomForest&) const = default;

private:
  std::vector<DecisionTree> trees_;
};

class BernoulliNb {
public:
  /// Inputs are binarized: any value above 0 counts as present.
  static BernoulliNb fit(const Matrix& x, std::span<const int> y, double alpha);

  double score(std::span<const double> x) const;
  /// log P(class) + sum of per-feature log likelihoods, index 0 benign, 1 malicious.
  std::array<double, 2> joint_log_likelihood(std::span<const double> x) const;

  const std::vector<double>& feature_prob(int cls) const noexcept { return prob_[cls]; }
  double prior(int cls) const noexcept { return prior_[cls]; }

  void write(ByteWriter& w) const;
  static BernoulliNb read(ByteReader& r);
  bool operator==(const BernoulliNb&) const = default;

private:
  void prepare();

  std::array<double, 2> prior_{};
  std::array<std::vector<double>, 2> prob_;
  // derived: sum of log(1-p) and per-feature log(p) - log(1-p)
  std::array<double, 2> absent_sum_{};
  std::array<std::vector<double>, 2> present_delta_;
};

struct SvmOptions {
  double c = 1.0;
  std::size_t epochs = 100;
};

/// Linear SVM trained with Pegasos. The bias is a weight on a constant 1 input.
class LinearSvm {
public:
  static LinearSvm fit(const Matrix& x, std::span<const int> y, const SvmOptions& opts, std::uint64_t seed);

  double margin(std::span<const double> x) const;
  double score(std::span<const double> x) const;
  /// Mean hinge loss max(0, 1 - y*margin) with y in {-1, +1}.
  double hinge_loss(const Matrix& x, std::span<const int> y) const;

  const std::vector<double>& weights() const noexcept { return w_; }
  double bias() const noexcept { return b_; }

  void write(ByteWriter& w) const;
  static LinearSvm read(ByteReader& r);
  bool operator==(const LinearSvm&) const = default;

private:
  std::vector<double> w_;
  double b_ = 0.0;
};

struct MlpOptions {
  std::size_t hidden_units = 64;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;

  bool operator==(const MlpOptions&) const = default;
};

/// One hidden logistic layer, logistic output, binary cross-entropy, Adam.
class Mlp {
public:
  /// Glorot-uniform weights, zero biases.
  static Mlp initialize(std::size_t inputs, std::size_t hidden, std::uint64_t seed);
  static Mlp fit(const Matrix& x, std::span<const int> y, const MlpOptions& opts, std::uint64_t seed);

  double score(std::span<const double> x) const;

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t hidden() const noexcept { return hidden_; }
  /// All parameters flattened: W1 (inputs x hidden, row-major), b1, w2, b2.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);
  /// Mean cross-entropy over the given rows; fills `grad` (same layout as parameters()) when non-null.
  double loss(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
              std::vector<double>* grad) const;

  void write(ByteWriter& w) const;
  static Mlp read(ByteReader& r);
  bool operator==(const Mlp&) const = default;

private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> w1_; ///< inputs x hidden
  std::vector<double> b1_;
  std::vector<double> w2_;
  double b2_ = 0.0;
};

struct LogisticOptions {
  double l2 = 1e-4;
  double learning_rate = 0.5;
  std::size_t iterations = 2000;
};

/// Full-batch gradient descent logistic regression; the bias is not penalized.
class LogisticRegression {
public:
  static LogisticRegression fit(const Matrix& x, std::span<const int> y, const LogisticOptions& opts);

  double score(std::span<const double> x) const;
  const std::vector<double>& weights() const noexcept { return w_; }
  double bias() const noexcept { return b_; }

  void write(ByteWriter& w) const;
  static LogisticRegression read(ByteReader& r);
  bool operator==(const LogisticRegression&) const = default;

private:
  std::vector<double> w_;
  double b_ = 0.0;
};

struct StackingOptions {
  std::size_t inner_folds = 5;
  TreeOptions tree;
  ForestOptions forest;
  SvmOptions svm;
  MlpOptions mlp;
  double nb_alpha = 1.0;
  LogisticOptions meta;
};

/// Base learners in meta-feature order.
enum class BaseLearner { RandomForest, LinearSvm, Mlp, DecisionTree, BernoulliNb };
inline constexpr std::size_t kBaseLearnerCount = 5;

/// RF + SVM + MLP + DT + NB combined by logistic regression over out-of-fold scores.
class Stacking {
public:
  /// Throws Error(TooFewExamples) below 10 rows or when a class cannot fill two inner folds.
  static Stacking fit(const Matrix& x, std::span<const int> y, const StackingOptions& opts, std::uint64_t seed);

  std::array<double, kBaseLearnerCount> base_scores(std::span<const double> x) const;
  double score(std::span<const double> x) const;
  /// Meta-learner applied to given base scores.
  double combine(std::span<const double> base_scores) const;

  const RandomForest& forest() const noexcept { return rf_; }
  const LinearSvm& svm() const noexcept { return svm_; }
  const Mlp& mlp() const noexcept { return mlp_; }
  const DecisionTree& tree() const noexcept { return dt_; }
  const BernoulliNb& nb() const noexcept { return nb_; }
  const LogisticRegression& meta() const noexcept { return meta_; }
  std::size_t inner_folds_used() const noexcept { return inner_folds_used_; }

  void write(ByteWriter& w) const;
  static Stacking read(ByteReader& r);
  bool operator==(const Stacking&) const = default;

private:
  RandomForest rf_;
  LinearSvm svm_;
  Mlp mlp_;
  DecisionTree dt_;
  BernoulliNb nb_;
  LogisticRegression meta_;
  std::size_t inner_folds_used_ = 0;
};

inline double logistic(double z) noexcept {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

} // namespace sentinel::ml

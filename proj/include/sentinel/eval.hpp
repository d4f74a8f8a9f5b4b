#pragma once

#include "sentinel/features.hpp"
#include "sentinel/folds.hpp"
#include "sentinel/ml/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const ClassMetrics&) const = default;
};

struct MetricsReport {
  ClassMetrics malicious;
  ClassMetrics benign;
  ClassMetrics overall; ///< unweighted mean of the two classes
  std::size_t support_malicious = 0;
  std::size_t support_benign = 0;

  bool operator==(const MetricsReport&) const = default;
};

/// Labels are 1 for malicious and 0 for benign. Zero denominators give 0.
/// Throws Error(LengthMismatch) or Error(Empty).
MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred);
MetricsReport compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred);

struct PipelineConfig {
  ModelKind kind = ModelKind::Stacking;
  FeatureSet feature_set = FeatureSet::Combined;
  Hyperparams hyperparams;
  TokenizerConfig tokenizer;
};

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t vocab_size = 0;
  MetricsReport metrics;
};

struct CvReport {
  PipelineConfig config;
  std::size_t k = 10;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  MetricsReport averaged; ///< unweighted mean over all k * repeats folds
};

/// Test hooks; everything defaults to the normal pipeline.
struct CvHooks {
  /// Reuse the repeat-0 seeds for every repeat.
  bool same_seed_every_repeat = false;
  /// Sees the vocabulary fitted for each training portion.
  std::function<void(std::size_t repeat, std::size_t fold, const Vocabulary&)> on_vocabulary;
  /// Replaces the learner: given train matrix/labels and test matrix, returns test predictions.
  std::function<std::vector<int>(const ml::Matrix&, std::span<const int>, const ml::Matrix&)> learner;
};

/// Stratified repeated k-fold evaluation; the vocabulary is refit on every training portion.
CvReport evaluate_cv(std::span<const DatasetRecord> dataset, const PipelineConfig& config, std::size_t k,
                     std::size_t repeats, std::uint64_t seed, const CvHooks& hooks = {});

struct FeatureImportance {
  std::string name;
  bool structured = false;
  std::size_t column = 0; ///< column in the model input
  double mean_delta = 0.0;
  double std_delta = 0.0;
  std::vector<double> deltas;
};

struct ImportanceReport {
  double baseline = 0.0; ///< overall F1 on the intact data
  std::size_t repeats = 0;
  std::vector<FeatureImportance> features; ///< sorted by mean_delta descending
};

/// Permutes each structured column and the top-K token columns by document frequency.
/// Throws Error(Empty) for an empty dataset and Error(InvalidArgument) for zero repeats.
ImportanceReport permutation_importance(const TrainedModel& model, std::span<const DatasetRecord> dataset,
                                        std::size_t n_repeats, std::uint64_t seed, std::size_t top_k = 50);
/// Same on a prepared input matrix; `names` labels every column.
ImportanceReport permutation_importance(const TrainedModel& model, const ml::Matrix& x, std::span<const int> y,
                                        std::span<const std::size_t> columns, std::span<const std::string> names,
                                        std::size_t n_repeats, std::uint64_t seed);

/// {config, per_fold, averaged, importance} with fixed key order.
std::string cv_report_json(const CvReport& report, const ImportanceReport* importance = nullptr);
std::string importance_report_json(const ImportanceReport& report);
std::string format_metrics_text(const MetricsReport& m);

} // namespace sentinel

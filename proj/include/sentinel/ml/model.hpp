#pragma once

#include "sentinel/features.hpp"
#include "sentinel/ml/learners.hpp"
#include "sentinel/textfeat.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace sentinel {

inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class ModelKind { DecisionTree, RandomForest, LinearSvm, Mlp, BernoulliNb, Stacking };

/// Short names: dt, rf, svm, mlp, nb, stacking.
std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// Which columns reach the classifier: both blocks, the seven booleans, or the text vector.
enum class FeatureSet { Combined, Structured, Text };

std::string_view to_string(FeatureSet set);
FeatureSet feature_set_from_string(std::string_view name);

struct Hyperparams {
  std::size_t rf_trees = 12;
  std::size_t dt_max_depth = 15;
  double svm_c = 1.0;
  std::size_t svm_epochs = 100;
  ml::MlpOptions mlp;
  double nb_alpha = 1.0;
  std::size_t stacking_folds = 5;
  double meta_l2 = 1e-4;
  double meta_learning_rate = 0.5;
  std::size_t meta_iterations = 2000;

  /// Throws Error(ConfigError) on zero counts or non-positive rates.
  void validate() const;
  ml::StackingOptions stacking_options() const;
  bool operator==(const Hyperparams&) const = default;
};

struct Prediction {
  Label label = Label::Benign;
  double score = 0.0; ///< malicious probability-like value; malicious iff >= 0.5
};

using Learner = std::variant<ml::DecisionTree, ml::RandomForest, ml::LinearSvm, ml::Mlp, ml::BernoulliNb, ml::Stacking>;

struct TrainedModel {
  std::uint32_t format_version = kModelFormatVersion;
  ModelKind kind = ModelKind::Stacking;
  FeatureSet feature_set = FeatureSet::Combined;
  std::uint64_t seed = 0;
  Hyperparams hyperparams;
  ScanConfig scan = ScanConfig::defaults();
  std::size_t min_setup_keys = 3;
  TokenizerConfig tokenizer;
  Vocabulary vocab;
  Learner learner;

  /// 7 and/or the vocabulary size, depending on the feature set.
  std::size_t input_width() const;
  /// Extraction settings the model was trained with (bundled allowlist).
  ExtractionConfig extraction_config() const;
};

/// Classifier input for one package.
std::vector<double> model_input(FeatureSet set, const FeatureVector& v);
/// Design matrix for records, vectorizing tokens with the given vocabulary.
ml::Matrix design_matrix(std::span<const DatasetRecord> records, const Vocabulary& vocab, VectorMode mode,
                         FeatureSet set);
std::vector<int> label_vector(std::span<const DatasetRecord> records);

/// Fits the vocabulary on the records' tokens, then the learner.
TrainedModel train_model(std::span<const DatasetRecord> records, ModelKind kind, FeatureSet set,
                         const Hyperparams& hp, const ExtractionConfig& extraction, std::uint64_t seed);

/// Fits only the learner on a prepared matrix.
Learner train_learner(ModelKind kind, const ml::Matrix& x, std::span<const int> y, const Hyperparams& hp,
                      std::uint64_t seed);
double learner_score(const Learner& learner, std::span<const double> x);

/// Throws Error(WidthMismatch) when the text vector does not match the vocabulary.
Prediction predict(const TrainedModel& model, const FeatureVector& v);
/// Scores a ready classifier input; throws Error(WidthMismatch).
Prediction predict_input(const TrainedModel& model, std::span<const double> x);

std::string serialize_model(const TrainedModel& model);
/// Throws Error with BadMagic, VersionUnsupported or Corrupt.
TrainedModel deserialize_model(std::string_view bytes);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace sentinel

#include "sentinel/ml/model.hpp"

#include "sentinel/error.hpp"
#include "sentinel/serial.hpp"
#include "sentinel/text.hpp"

#include <algorithm>
#include <string>

namespace sentinel {

namespace {

constexpr std::string_view kMagic = "SDSM";

// section tags, little-endian ASCII
constexpr std::uint32_t tag(const char (&s)[5]) {
  return std::uint32_t(std::uint8_t(s[0])) | std::uint32_t(std::uint8_t(s[1])) << 8 |
         std::uint32_t(std::uint8_t(s[2])) << 16 | std::uint32_t(std::uint8_t(s[3])) << 24;
}
constexpr std::uint32_t kTagHead = tag("HEAD");
constexpr std::uint32_t kTagHyper = tag("HYPR");
constexpr std::uint32_t kTagExtract = tag("EXTR");
constexpr std::uint32_t kTagTokenizer = tag("TOKN");
constexpr std::uint32_t kTagVocab = tag("VOCB");
constexpr std::uint32_t kTagLearner = tag("LRNR");

void expect_tag(ByteReader& r, std::uint32_t expected, std::string_view name) {
  if (r.u32() != expected) {
    throw Error(ErrorCode::Corrupt, "model file: missing " + std::string(name) + " section");
  }
}

std::uint32_t checked_u32(std::size_t v, std::string_view what) {
  if (v > 0xFFFFFFFFULL) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " does not fit the model format");
  }
  return static_cast<std::uint32_t>(v);
}

void validate_learner_width(const Learner& learner, std::size_t width) {
  auto bad = [] { throw Error(ErrorCode::Corrupt, "learner parameters do not match the model input width"); };
  auto check_tree = [&](const ml::DecisionTree& t) {
    for (const auto& n : t.nodes()) {
      if (n.feature >= 0 && static_cast<std::size_t>(n.feature) >= width) {
        bad();
      }
    }
  };
  auto check_forest = [&](const ml::RandomForest& f) {
    for (const auto& t : f.trees()) {
      check_tree(t);
    }
  };
  auto check_svm = [&](const ml::LinearSvm& s) {
    if (s.weights().size() != width) bad();
  };
  auto check_mlp = [&](const ml::Mlp& m) {
    if (m.inputs() != width) bad();
  };
  auto check_nb = [&](const ml::BernoulliNb& nb) {
    if (nb.feature_prob(0).size() != width) bad();
  };
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ml::DecisionTree>) {
          check_tree(l);
        } else if constexpr (std::is_same_v<T, ml::RandomForest>) {
          check_forest(l);
        } else if constexpr (std::is_same_v<T, ml::LinearSvm>) {
          check_svm(l);
        } else if constexpr (std::is_same_v<T, ml::Mlp>) {
          check_mlp(l);
        } else if constexpr (std::is_same_v<T, ml::BernoulliNb>) {
          check_nb(l);
        } else {
          check_forest(l.forest());
          check_svm(l.svm());
          check_mlp(l.mlp());
          check_tree(l.tree());
          check_nb(l.nb());
        }
      },
      learner);
}

} // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::DecisionTree: return "dt";
  case ModelKind::RandomForest: return "rf";
  case ModelKind::LinearSvm: return "svm";
  case ModelKind::Mlp: return "mlp";
  case ModelKind::BernoulliNb: return "nb";
  case ModelKind::Stacking: return "stacking";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  auto n = ascii_lower(trim(name));
  for (auto k : {ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::LinearSvm, ModelKind::Mlp,
                 ModelKind::BernoulliNb, ModelKind::Stacking}) {
    if (n == to_string(k)) {
      return k;
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(FeatureSet set) {
  switch (set) {
  case FeatureSet::Combined: return "combined";
  case FeatureSet::Structured: return "structured";
  case FeatureSet::Text: return "text";
  }
  return "unknown";
}

FeatureSet feature_set_from_string(std::string_view name) {
  auto n = ascii_lower(trim(name));
  for (auto s : {FeatureSet::Combined, FeatureSet::Structured, FeatureSet::Text}) {
    if (n == to_string(s)) {
      return s;
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown feature set '" + std::string(name) + "'");
}

void Hyperparams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (rf_trees == 0) fail("rf_trees must be at least 1");
  if (dt_max_depth == 0) fail("dt_max_depth must be at least 1");
  if (!(svm_c > 0)) fail("svm C must be positive");
  if (svm_epochs == 0) fail("svm_epochs must be at least 1");
  if (mlp.hidden_units == 0 || mlp.epochs == 0 || mlp.batch_size == 0) fail("MLP counts must be at least 1");
  if (!(mlp.learning_rate > 0)) fail("MLP learning rate must be positive");
  if (!(nb_alpha > 0)) fail("nb_alpha must be positive");
  if (stacking_folds < 2) fail("stacking_folds must be at least 2");
  if (!(meta_l2 >= 0) || !(meta_learning_rate > 0) || meta_iterations == 0) fail("invalid meta-learner settings");
}

ml::StackingOptions Hyperparams::stacking_options() const {
  ml::StackingOptions o;
  o.inner_folds = stacking_folds;
  o.tree.max_depth = dt_max_depth;
  o.forest.n_trees = rf_trees;
  o.svm.c = svm_c;
  o.svm.epochs = svm_epochs;
  o.mlp = mlp;
  o.nb_alpha = nb_alpha;
  o.meta.l2 = meta_l2;
  o.meta.learning_rate = meta_learning_rate;
  o.meta.iterations = meta_iterations;
  return o;
}

std::size_t TrainedModel::input_width() const {
  switch (feature_set) {
  case FeatureSet::Structured: return kStructuredCount;
  case FeatureSet::Text: return vocab.size();
  case FeatureSet::Combined: break;
  }
  return kStructuredCount + vocab.size();
}

ExtractionConfig TrainedModel::extraction_config() const {
  ExtractionConfig cfg;
  cfg.scan = scan;
  cfg.tokenizer = tokenizer;
  cfg.min_setup_keys = min_setup_keys;
  return cfg;
}

std::vector<double> model_input(FeatureSet set, const FeatureVector& v) {
  std::vector<double> out;
  if (set != FeatureSet::Text) {
    for (bool b : v.structured) {
      out.push_back(b ? 1.0 : 0.0);
    }
  }
  if (set != FeatureSet::Structured) {
    out.insert(out.end(), v.text.begin(), v.text.end());
  }
  return out;
}

ml::Matrix design_matrix(std::span<const DatasetRecord> records, const Vocabulary& vocab, VectorMode mode,
                         FeatureSet set) {
  const std::size_t width = (set == FeatureSet::Text ? 0 : kStructuredCount) +
                            (set == FeatureSet::Structured ? 0 : vocab.size());
  ml::Matrix m(records.size(), width);
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::size_t col = 0;
    if (set != FeatureSet::Text) {
      for (bool b : records[r].structured) {
        if (b) {
          m.set(r, col, 1.0);
        }
        ++col;
      }
    }
    if (set != FeatureSet::Structured) {
      auto text = vectorize(records[r].tokens, vocab, mode);
      for (std::size_t j = 0; j < text.size(); ++j) {
        if (text[j] != 0.0) {
          m.set(r, col + j, text[j]);
        }
      }
    }
  }
  return m;
}

std::vector<int> label_vector(std::span<const DatasetRecord> records) {
  std::vector<int> y;
  y.reserve(records.size());
  for (const auto& r : records) {
    y.push_back(r.label == Label::Malicious ? 1 : 0);
  }
  return y;
}

Learner train_learner(ModelKind kind, const ml::Matrix& x, std::span<const int> y, const Hyperparams& hp,
                      std::uint64_t seed) {
  hp.validate();
  auto opts = hp.stacking_options();
  switch (kind) {
  case ModelKind::DecisionTree: return ml::DecisionTree::fit(x, y, opts.tree);
  case ModelKind::RandomForest: return ml::RandomForest::fit(x, y, opts.forest, seed);
  case ModelKind::LinearSvm: return ml::LinearSvm::fit(x, y, opts.svm, seed);
  case ModelKind::Mlp: return ml::Mlp::fit(x, y, opts.mlp, seed);
  case ModelKind::BernoulliNb: return ml::BernoulliNb::fit(x, y, opts.nb_alpha);
  case ModelKind::Stacking: return ml::Stacking::fit(x, y, opts, seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

double learner_score(const Learner& learner, std::span<const double> x) {
  return std::visit([&](const auto& l) { return l.score(x); }, learner);
}

TrainedModel train_model(std::span<const DatasetRecord> records, ModelKind kind, FeatureSet set,
                         const Hyperparams& hp, const ExtractionConfig& extraction, std::uint64_t seed) {
  extraction.validate();
  hp.validate();
  TrainedModel model;
  model.kind = kind;
  model.feature_set = set;
  model.seed = seed;
  model.hyperparams = hp;
  model.scan = extraction.scan;
  model.min_setup_keys = extraction.min_setup_keys;
  model.tokenizer = extraction.tokenizer;
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(records.size());
  for (const auto& r : records) {
    corpus.push_back(r.tokens);
  }
  model.vocab = fit_vocabulary(corpus, extraction.tokenizer);
  auto x = design_matrix(records, model.vocab, extraction.tokenizer.mode, set);
  auto y = label_vector(records);
  model.learner = train_learner(kind, x, y, hp, seed);
  return model;
}

Prediction predict_input(const TrainedModel& model, std::span<const double> x) {
  if (x.size() != model.input_width()) {
    throw Error(ErrorCode::WidthMismatch, "input width " + std::to_string(x.size()) + " does not match model width " +
                                              std::to_string(model.input_width()));
  }
  Prediction p;
  p.score = learner_score(model.learner, x);
  p.label = p.score >= 0.5 ? Label::Malicious : Label::Benign;
  return p;
}

Prediction predict(const TrainedModel& model, const FeatureVector& v) {
  if (v.text.size() != model.vocab.size()) {
    throw Error(ErrorCode::WidthMismatch, "text vector width " + std::to_string(v.text.size()) +
                                              " does not match vocabulary size " + std::to_string(model.vocab.size()));
  }
  return predict_input(model, model_input(model.feature_set, v));
}

// ---------------------------------------------------------------------------
// persistence

std::string serialize_model(const TrainedModel& model) {
  ByteWriter body;
  body.u32(kTagHead);
  body.u8(static_cast<std::uint8_t>(model.kind));
  body.u8(static_cast<std::uint8_t>(model.feature_set));
  body.u64(model.seed);

  const auto& hp = model.hyperparams;
  body.u32(kTagHyper);
  body.u32(checked_u32(hp.rf_trees, "rf_trees"));
  body.u32(checked_u32(hp.dt_max_depth, "dt_max_depth"));
  body.f64(hp.svm_c);
  body.u32(checked_u32(hp.svm_epochs, "svm_epochs"));
  body.u32(checked_u32(hp.mlp.hidden_units, "hidden_units"));
  body.f64(hp.mlp.learning_rate);
  body.f64(hp.mlp.beta1);
  body.f64(hp.mlp.beta2);
  body.f64(hp.mlp.epsilon);
  body.u32(checked_u32(hp.mlp.epochs, "epochs"));
  body.u32(checked_u32(hp.mlp.batch_size, "batch_size"));
  body.f64(hp.nb_alpha);
  body.u32(checked_u32(hp.stacking_folds, "stacking_folds"));
  body.f64(hp.meta_l2);
  body.f64(hp.meta_learning_rate);
  body.u32(checked_u32(hp.meta_iterations, "meta_iterations"));

  body.u32(kTagExtract);
  std::vector<std::string> apis(model.scan.api_list.begin(), model.scan.api_list.end());
  std::vector<std::string> exts(model.scan.scan_extensions.begin(), model.scan.scan_extensions.end());
  body.strs(apis);
  body.u32(checked_u32(model.scan.long_string_threshold, "long_string_threshold"));
  body.strs(exts);
  body.u32(checked_u32(model.min_setup_keys, "min_setup_keys"));

  const auto& tk = model.tokenizer;
  body.u32(kTagTokenizer);
  body.boolean(tk.lowercase);
  body.u32(checked_u32(tk.num_words, "num_words"));
  body.u8(static_cast<std::uint8_t>(tk.mode));
  body.boolean(tk.remove_keywords);
  body.boolean(tk.remove_stopwords);
  body.boolean(tk.stemming);

  body.u32(kTagVocab);
  body.strs(model.vocab.tokens());
  body.u32s(model.vocab.doc_freq());
  body.u64(model.vocab.corpus_size());

  body.u32(kTagLearner);
  body.u8(static_cast<std::uint8_t>(model.learner.index()));
  std::visit([&](const auto& l) { l.write(body); }, model.learner);

  ByteWriter out;
  out.raw(kMagic);
  out.u32(model.format_version);
  out.u64(body.bytes().size());
  out.raw(body.bytes());
  out.u64(fnv1a64(body.bytes()));
  return out.take();
}

TrainedModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < kMagic.size()) {
    if (kMagic.substr(0, bytes.size()) == bytes) {
      throw Error(ErrorCode::Corrupt, "model file is truncated");
    }
    throw Error(ErrorCode::BadMagic, "not a model file");
  }
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::BadMagic, "not a model file (bad magic bytes)");
  }
  ByteReader head(bytes.substr(kMagic.size()));
  TrainedModel model;
  model.format_version = head.u32();
  if (model.format_version != kModelFormatVersion) {
    throw Error(ErrorCode::VersionUnsupported,
                "model format version " + std::to_string(model.format_version) + " is not supported");
  }
  auto body_len = head.u64();
  if (body_len > head.remaining()) {
    throw Error(ErrorCode::Corrupt, "model file is truncated");
  }
  auto body_bytes = head.raw(static_cast<std::size_t>(body_len));
  auto checksum = head.u64();
  if (!head.done()) {
    throw Error(ErrorCode::Corrupt, "trailing bytes after model body");
  }
  if (checksum != fnv1a64(body_bytes)) {
    throw Error(ErrorCode::Corrupt, "model checksum mismatch");
  }

  ByteReader r(body_bytes);
  expect_tag(r, kTagHead, "header");
  auto kind = r.u8();
  auto set = r.u8();
  if (kind > static_cast<std::uint8_t>(ModelKind::Stacking) || set > static_cast<std::uint8_t>(FeatureSet::Text)) {
    throw Error(ErrorCode::Corrupt, "unknown model kind or feature set");
  }
  model.kind = static_cast<ModelKind>(kind);
  model.feature_set = static_cast<FeatureSet>(set);
  model.seed = r.u64();

  expect_tag(r, kTagHyper, "hyperparameter");
  auto& hp = model.hyperparams;
  hp.rf_trees = r.u32();
  hp.dt_max_depth = r.u32();
  hp.svm_c = r.f64();
  hp.svm_epochs = r.u32();
  hp.mlp.hidden_units = r.u32();
  hp.mlp.learning_rate = r.f64();
  hp.mlp.beta1 = r.f64();
  hp.mlp.beta2 = r.f64();
  hp.mlp.epsilon = r.f64();
  hp.mlp.epochs = r.u32();
  hp.mlp.batch_size = r.u32();
  hp.nb_alpha = r.f64();
  hp.stacking_folds = r.u32();
  hp.meta_l2 = r.f64();
  hp.meta_learning_rate = r.f64();
  hp.meta_iterations = r.u32();

  expect_tag(r, kTagExtract, "extraction");
  auto apis = r.strs();
  model.scan.api_list = std::set<std::string>(apis.begin(), apis.end());
  model.scan.long_string_threshold = r.u32();
  auto exts = r.strs();
  model.scan.scan_extensions = std::set<std::string>(exts.begin(), exts.end());
  model.min_setup_keys = r.u32();

  expect_tag(r, kTagTokenizer, "tokenizer");
  auto& tk = model.tokenizer;
  tk.lowercase = r.boolean();
  tk.num_words = r.u32();
  auto mode = r.u8();
  if (mode > static_cast<std::uint8_t>(VectorMode::Tfidf)) {
    throw Error(ErrorCode::Corrupt, "unknown tokenizer mode");
  }
  tk.mode = static_cast<VectorMode>(mode);
  tk.remove_keywords = r.boolean();
  tk.remove_stopwords = r.boolean();
  tk.stemming = r.boolean();

  expect_tag(r, kTagVocab, "vocabulary");
  auto tokens = r.strs();
  auto df = r.u32s();
  auto corpus_size = r.u64();
  try {
    model.vocab = Vocabulary(std::move(tokens), std::move(df), static_cast<std::size_t>(corpus_size));
  } catch (const Error& e) {
    throw Error(ErrorCode::Corrupt, std::string("model vocabulary: ") + e.what());
  }

  expect_tag(r, kTagLearner, "learner");
  auto index = r.u8();
  switch (index) {
  case 0: model.learner = ml::DecisionTree::read(r); break;
  case 1: model.learner = ml::RandomForest::read(r); break;
  case 2: model.learner = ml::LinearSvm::read(r); break;
  case 3: model.learner = ml::Mlp::read(r); break;
  case 4: model.learner = ml::BernoulliNb::read(r); break;
  case 5: model.learner = ml::Stacking::read(r); break;
  default: throw Error(ErrorCode::Corrupt, "unknown learner block");
  }
  if (index != static_cast<std::uint8_t>(model.kind)) {
    throw Error(ErrorCode::Corrupt, "learner block does not match the model kind");
  }
  if (!r.done()) {
    throw Error(ErrorCode::Corrupt, "unexpected bytes after learner block");
  }
  validate_learner_width(model.learner, model.input_width());
  try {
    hp.validate();
    model.scan.validate();
    tk.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Corrupt, std::string("model settings: ") + e.what());
  }
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_file(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

} // namespace sentinel

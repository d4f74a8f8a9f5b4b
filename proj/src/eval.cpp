#include "sentinel/eval.hpp"

#include "sentinel/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace sentinel {

namespace {

ClassMetrics class_metrics(double tp, double fp, double fn) {
  ClassMetrics m;
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

ClassMetrics mean_of(const ClassMetrics& a, const ClassMetrics& b) {
  return {(a.precision + b.precision) / 2, (a.recall + b.recall) / 2, (a.f1 + b.f1) / 2};
}

void accumulate(ClassMetrics& sum, const ClassMetrics& m) {
  sum.precision += m.precision;
  sum.recall += m.recall;
  sum.f1 += m.f1;
}

void scale(ClassMetrics& m, double f) {
  m.precision *= f;
  m.recall *= f;
  m.f1 *= f;
}

std::vector<int> predict_rows(const TrainedModel& model, const ml::Matrix& x) {
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    out[r] = predict_input(model, x.row(r)).label == Label::Malicious ? 1 : 0;
  }
  return out;
}

nlohmann::ordered_json metrics_json(const MetricsReport& m) {
  auto cls = [](const ClassMetrics& c) {
    nlohmann::ordered_json j;
    j["precision"] = c.precision;
    j["recall"] = c.recall;
    j["f1"] = c.f1;
    return j;
  };
  nlohmann::ordered_json j;
  j["malicious"] = cls(m.malicious);
  j["benign"] = cls(m.benign);
  j["overall"] = cls(m.overall);
  j["support"] = {{"malicious", m.support_malicious}, {"benign", m.support_benign}};
  return j;
}

nlohmann::ordered_json importance_json(const ImportanceReport& rep) {
  nlohmann::ordered_json j;
  j["baseline_f1"] = rep.baseline;
  j["repeats"] = rep.repeats;
  auto features = nlohmann::ordered_json::array();
  for (const auto& f : rep.features) {
    nlohmann::ordered_json e;
    e["name"] = f.name;
    e["kind"] = f.structured ? "structured" : "token";
    e["column"] = f.column;
    e["mean_delta_f1"] = f.mean_delta;
    e["std_delta_f1"] = f.std_delta;
    features.push_back(std::move(e));
  }
  j["features"] = std::move(features);
  return j;
}

} // namespace

MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  }
  if (y_true.empty()) {
    throw Error(ErrorCode::Empty, "no predictions to score");
  }
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    bool t = y_true[i] == 1;
    bool p = y_pred[i] == 1;
    if (t && p) ++tp;
    else if (!t && p) ++fp;
    else if (t && !p) ++fn;
    else ++tn;
  }
  MetricsReport m;
  m.malicious = class_metrics(tp, fp, fn);
  m.benign = class_metrics(tn, fn, fp);
  m.overall = mean_of(m.malicious, m.benign);
  m.support_malicious = static_cast<std::size_t>(tp + fn);
  m.support_benign = static_cast<std::size_t>(tn + fp);
  return m;
}

MetricsReport compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred) {
  std::vector<int> t, p;
  for (auto l : y_true) t.push_back(l == Label::Malicious ? 1 : 0);
  for (auto l : y_pred) p.push_back(l == Label::Malicious ? 1 : 0);
  return compute_metrics(t, p);
}

CvReport evaluate_cv(std::span<const DatasetRecord> dataset, const PipelineConfig& config, std::size_t k,
                     std::size_t repeats, std::uint64_t seed, const CvHooks& hooks) {
  if (repeats == 0) {
    throw Error(ErrorCode::InvalidArgument, "repeats must be at least 1");
  }
  config.tokenizer.validate();
  config.hyperparams.validate();
  CvReport report;
  report.config = config;
  report.k = k;
  report.repeats = repeats;
  report.seed = seed;
  const auto y = label_vector(dataset);

  for (std::size_t rep = 0; rep < repeats; ++rep) {
    const std::size_t seed_rep = hooks.same_seed_every_repeat ? 0 : rep;
    auto folds = stratified_k_fold(y, k, derive_seed(seed, {seed_rep}));
    for (std::size_t f = 0; f < k; ++f) {
      const auto& test_idx = folds[f];
      auto train_idx = fold_complement(dataset.size(), test_idx);
      std::vector<DatasetRecord> train, test;
      std::vector<int> ytrain, ytest;
      for (auto i : train_idx) {
        train.push_back(dataset[i]);
        ytrain.push_back(y[i]);
      }
      for (auto i : test_idx) {
        test.push_back(dataset[i]);
        ytest.push_back(y[i]);
      }
      std::vector<std::vector<std::string>> corpus;
      for (const auto& r : train) {
        corpus.push_back(r.tokens);
      }
      auto vocab = fit_vocabulary(corpus, config.tokenizer);
      if (hooks.on_vocabulary) {
        hooks.on_vocabulary(rep, f, vocab);
      }
      auto xtrain = design_matrix(train, vocab, config.tokenizer.mode, config.feature_set);
      auto xtest = design_matrix(test, vocab, config.tokenizer.mode, config.feature_set);
      std::vector<int> pred;
      if (hooks.learner) {
        pred = hooks.learner(xtrain, ytrain, xtest);
      } else {
        TrainedModel model;
        model.kind = config.kind;
        model.feature_set = config.feature_set;
        model.hyperparams = config.hyperparams;
        model.tokenizer = config.tokenizer;
        model.vocab = vocab;
        model.learner = train_learner(config.kind, xtrain, ytrain, config.hyperparams,
                                      derive_seed(seed, {seed_rep, f, 0x7472}));
        pred = predict_rows(model, xtest);
      }
      FoldResult fr;
      fr.repeat = rep;
      fr.fold = f;
      fr.train_size = train.size();
      fr.test_size = test.size();
      fr.vocab_size = vocab.size();
      fr.metrics = compute_metrics(ytest, pred);
      report.folds.push_back(fr);
    }
  }

  MetricsReport avg;
  for (const auto& fr : report.folds) {
    accumulate(avg.malicious, fr.metrics.malicious);
    accumulate(avg.benign, fr.metrics.benign);
    accumulate(avg.overall, fr.metrics.overall);
  }
  const double inv = 1.0 / static_cast<double>(report.folds.size());
  scale(avg.malicious, inv);
  scale(avg.benign, inv);
  scale(avg.overall, inv);
  avg.support_malicious = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  avg.support_benign = y.size() - avg.support_malicious;
  report.averaged = avg;
  return report;
}

ImportanceReport permutation_importance(const TrainedModel& model, const ml::Matrix& x, std::span<const int> y,
                                        std::span<const std::size_t> columns, std::span<const std::string> names,
                                        std::size_t n_repeats, std::uint64_t seed) {
  if (x.rows() == 0) {
    throw Error(ErrorCode::Empty, "permutation importance needs at least one example");
  }
  if (n_repeats == 0) {
    throw Error(ErrorCode::InvalidArgument, "repeats must be at least 1");
  }
  if (columns.size() != names.size()) {
    throw Error(ErrorCode::LengthMismatch, "one name is needed per column");
  }
  ImportanceReport rep;
  rep.repeats = n_repeats;
  rep.baseline = compute_metrics(y, predict_rows(model, x)).overall.f1;
  ml::Matrix work = x;
  std::vector<std::size_t> perm(x.rows());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::size_t col = columns[c];
    FeatureImportance fi;
    fi.name = names[c];
    fi.column = col;
    fi.structured = model.feature_set != FeatureSet::Text && col < kStructuredCount;
    std::vector<double> original(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      original[r] = x.at(r, col);
    }
    for (std::size_t k = 0; k < n_repeats; ++k) {
      std::iota(perm.begin(), perm.end(), 0);
      Rng rng(derive_seed(seed, {col, k}));
      rng.shuffle(perm);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        work.set(r, col, original[perm[r]]);
      }
      double f1 = compute_metrics(y, predict_rows(model, work)).overall.f1;
      fi.deltas.push_back(rep.baseline - f1);
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
      work.set(r, col, original[r]);
    }
    double mean = std::accumulate(fi.deltas.begin(), fi.deltas.end(), 0.0) / static_cast<double>(n_repeats);
    double var = 0.0;
    for (double d : fi.deltas) {
      var += (d - mean) * (d - mean);
    }
    fi.mean_delta = mean;
    fi.std_delta = std::sqrt(var / static_cast<double>(n_repeats));
    rep.features.push_back(std::move(fi));
  }
  std::stable_sort(rep.features.begin(), rep.features.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.mean_delta > b.mean_delta; });
  return rep;
}

ImportanceReport permutation_importance(const TrainedModel& model, std::span<const DatasetRecord> dataset,
                                        std::size_t n_repeats, std::uint64_t seed, std::size_t top_k) {
  if (dataset.empty()) {
    throw Error(ErrorCode::Empty, "permutation importance needs at least one example");
  }
  auto x = design_matrix(dataset, model.vocab, model.tokenizer.mode, model.feature_set);
  auto y = label_vector(dataset);
  std::vector<std::size_t> columns;
  std::vector<std::string> names;
  std::size_t offset = 0;
  if (model.feature_set != FeatureSet::Text) {
    for (std::size_t j = 0; j < kStructuredCount; ++j) {
      columns.push_back(j);
      names.emplace_back(structured_feature_names()[j]);
    }
    offset = kStructuredCount;
  }
  if (model.feature_set != FeatureSet::Structured) {
    std::vector<std::size_t> order(model.vocab.size());
    std::iota(order.begin(), order.end(), 0);
    const auto& df = model.vocab.doc_freq();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return df[a] > df[b]; });
    order.resize(std::min(order.size(), top_k));
    for (auto t : order) {
      columns.push_back(offset + t);
      names.push_back(model.vocab.tokens()[t]);
    }
  }
  return permutation_importance(model, x, y, columns, names, n_repeats, seed);
}

std::string cv_report_json(const CvReport& report, const ImportanceReport* importance) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["model"] = to_string(report.config.kind);
  cfg["feature_set"] = to_string(report.config.feature_set);
  cfg["folds"] = report.k;
  cfg["repeats"] = report.repeats;
  cfg["seed"] = report.seed;
  const auto& tk = report.config.tokenizer;
  cfg["tokenizer"] = {{"lowercase", tk.lowercase},           {"num_words", tk.num_words},
                      {"mode", std::string(to_string(tk.mode))}, {"remove_keywords", tk.remove_keywords},
                      {"remove_stopwords", tk.remove_stopwords}, {"stemming", tk.stemming}};
  const auto& hp = report.config.hyperparams;
  nlohmann::ordered_json h;
  h["rf_trees"] = hp.rf_trees;
  h["dt_max_depth"] = hp.dt_max_depth;
  h["svm_c"] = hp.svm_c;
  h["svm_epochs"] = hp.svm_epochs;
  h["mlp_hidden_units"] = hp.mlp.hidden_units;
  h["mlp_learning_rate"] = hp.mlp.learning_rate;
  h["mlp_epochs"] = hp.mlp.epochs;
  h["mlp_batch_size"] = hp.mlp.batch_size;
  h["nb_alpha"] = hp.nb_alpha;
  h["stacking_folds"] = hp.stacking_folds;
  h["meta_l2"] = hp.meta_l2;
  cfg["hyperparams"] = std::move(h);
  j["config"] = std::move(cfg);

  auto folds = nlohmann::ordered_json::array();
  for (const auto& fr : report.folds) {
    nlohmann::ordered_json e;
    e["repeat"] = fr.repeat;
    e["fold"] = fr.fold;
    e["train_size"] = fr.train_size;
    e["test_size"] = fr.test_size;
    e["vocab_size"] = fr.vocab_size;
    e["metrics"] = metrics_json(fr.metrics);
    folds.push_back(std::move(e));
  }
  j["per_fold"] = std::move(folds);
  j["averaged"] = metrics_json(report.averaged);
  j["importance"] = importance ? importance_json(*importance) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string importance_report_json(const ImportanceReport& report) {
  nlohmann::ordered_json j;
  j["importance"] = importance_json(report);
  return j.dump(2) + "\n";
}

std::string format_metrics_text(const MetricsReport& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "            precision  recall  f1\n"
                "malicious   %9.4f  %6.4f  %6.4f  (support %zu)\n"
                "benign      %9.4f  %6.4f  %6.4f  (support %zu)\n"
                "overall     %9.4f  %6.4f  %6.4f\n",
                m.malicious.precision, m.malicious.recall, m.malicious.f1, m.support_malicious, m.benign.precision,
                m.benign.recall, m.benign.f1, m.support_benign, m.overall.precision, m.overall.recall, m.overall.f1);
  return buf;
}

} // namespace sentinel

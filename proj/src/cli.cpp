#include "sentinel/cli.hpp"

#include "sentinel/corpus.hpp"
#include "sentinel/error.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/ini.hpp"
#include "sentinel/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace sentinel {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// config file

namespace {

bool parse_bool_value(const std::string& key, std::string_view value) {
  auto v = ascii_lower(trim(value));
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw Error(ErrorCode::ConfigError, "'" + key + "' expects a boolean, got '" + std::string(value) + "'");
}

std::size_t parse_size_value(const std::string& key, std::string_view value) {
  auto v = std::string(trim(value));
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    if (v.empty() || v[0] == '-') throw std::invalid_argument("negative");
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) {
    throw Error(ErrorCode::ConfigError, "'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(n);
}

double parse_double_value(const std::string& key, std::string_view value) {
  auto v = std::string(trim(value));
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) {
    throw Error(ErrorCode::ConfigError, "'" + key + "' expects a number, got '" + v + "'");
  }
  return d;
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : value) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

template <class F> auto as_config_error(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, "'" + key + "': " + e.what());
  }
}

} // namespace

ExtractionConfig CliConfig::extraction() const {
  ExtractionConfig cfg;
  cfg.scan = scan;
  cfg.tokenizer = tokenizer;
  cfg.min_setup_keys = min_setup_keys;
  if (allowlist) {
    cfg.allowlist = std::make_shared<const DomainAllowlist>(DomainAllowlist::load(*allowlist));
  }
  return cfg;
}

CliConfig parse_cli_config(std::string_view text) {
  auto doc = parse_ini(text);
  CliConfig cfg;
  for (const auto& section : doc.sections) {
    const auto& s = section.name;
    for (const auto& [key, value] : section.entries) {
      const std::string where = s + "." + key;
      bool known = true;
      if (s == "tokenizer") {
        if (key == "lowercase") cfg.tokenizer.lowercase = parse_bool_value(where, value);
        else if (key == "num_words") cfg.tokenizer.num_words = parse_size_value(where, value);
        else if (key == "mode") cfg.tokenizer.mode = as_config_error(where, [&] { return vector_mode_from_string(trim(value)); });
        else if (key == "remove_keywords") cfg.tokenizer.remove_keywords = parse_bool_value(where, value);
        else if (key == "remove_stopwords") cfg.tokenizer.remove_stopwords = parse_bool_value(where, value);
        else if (key == "stemming") cfg.tokenizer.stemming = parse_bool_value(where, value);
        else known = false;
      } else if (s == "scan") {
        if (key == "long_string_threshold") cfg.scan.long_string_threshold = parse_size_value(where, value);
        else if (key == "api_list") {
          auto items = parse_list(value);
          cfg.scan.api_list = std::set<std::string>(items.begin(), items.end());
        } else if (key == "extensions") {
          auto items = parse_list(value);
          cfg.scan.scan_extensions = std::set<std::string>(items.begin(), items.end());
        } else known = false;
      } else if (s == "hyperparams") {
        auto& hp = cfg.hyperparams;
        if (key == "rf_trees") hp.rf_trees = parse_size_value(where, value);
        else if (key == "dt_max_depth") hp.dt_max_depth = parse_size_value(where, value);
        else if (key == "svm_c") hp.svm_c = parse_double_value(where, value);
        else if (key == "svm_epochs") hp.svm_epochs = parse_size_value(where, value);
        else if (key == "mlp_hidden_units") hp.mlp.hidden_units = parse_size_value(where, value);
        else if (key == "mlp_learning_rate") hp.mlp.learning_rate = parse_double_value(where, value);
        else if (key == "mlp_beta1") hp.mlp.beta1 = parse_double_value(where, value);
        else if (key == "mlp_beta2") hp.mlp.beta2 = parse_double_value(where, value);
        else if (key == "mlp_epsilon") hp.mlp.epsilon = parse_double_value(where, value);
        else if (key == "mlp_epochs") hp.mlp.epochs = parse_size_value(where, value);
        else if (key == "mlp_batch_size") hp.mlp.batch_size = parse_size_value(where, value);
        else if (key == "nb_alpha") hp.nb_alpha = parse_double_value(where, value);
        else if (key == "stacking_folds") hp.stacking_folds = parse_size_value(where, value);
        else if (key == "meta_l2") hp.meta_l2 = parse_double_value(where, value);
        else if (key == "meta_learning_rate") hp.meta_learning_rate = parse_double_value(where, value);
        else if (key == "meta_iterations") hp.meta_iterations = parse_size_value(where, value);
        else known = false;
      } else if (s == "extraction") {
        if (key == "min_setup_keys") cfg.min_setup_keys = parse_size_value(where, value);
        else if (key == "allowlist") cfg.allowlist = fs::path(std::string(trim(value)));
        else known = false;
      } else if (s == "model") {
        if (key == "learner") cfg.learner = as_config_error(where, [&] { return model_kind_from_string(trim(value)); });
        else if (key == "feature_set") cfg.feature_set = as_config_error(where, [&] { return feature_set_from_string(trim(value)); });
        else known = false;
      } else if (s == "ablation") {
        if (key == "feature_sets") {
          cfg.ablation.clear();
          for (const auto& item : parse_list(value)) {
            cfg.ablation.push_back(as_config_error(where, [&] { return feature_set_from_string(item); }));
          }
        } else known = false;
      } else {
        throw Error(ErrorCode::ConfigError, "unknown section [" + s + "]");
      }
      if (!known) {
        throw Error(ErrorCode::ConfigError, "unknown key '" + where + "'");
      }
    }
  }
  cfg.tokenizer.validate();
  cfg.scan.validate();
  cfg.hyperparams.validate();
  return cfg;
}

CliConfig load_cli_config(const fs::path& path) {
  auto cfg = parse_cli_config(read_file(path));
  if (cfg.allowlist && cfg.allowlist->is_relative()) {
    cfg.allowlist = path.parent_path() / *cfg.allowlist;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// reports

namespace {

ordered_json optional_json(const std::optional<std::string>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json license_json(const std::optional<CanonicalLicense>& v) {
  return v ? ordered_json(std::string(to_string(*v))) : ordered_json(nullptr);
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

} // namespace

std::vector<Evidence> collect_evidence(const ExtractionResult& result, const DomainAllowlist& allowlist) {
  const auto& names = structured_feature_names();
  const auto& s = result.vector.structured;
  auto name = [&](StructuredFeature f) { return std::string(names[static_cast<std::size_t>(f)]); };
  auto value = [&](StructuredFeature f) { return s[static_cast<std::size_t>(f)]; };
  std::vector<Evidence> out;

  {
    ordered_json d;
    d["homepage"] = optional_json(result.metadata.homepage);
    d["project_urls"] = result.metadata.project_urls;
    out.push_back({name(StructuredFeature::InvalidHomepage), value(StructuredFeature::InvalidHomepage), d});
  }
  {
    ordered_json d;
    d["author_email"] = optional_json(result.metadata.author_email);
    d["maintainer_email"] = optional_json(result.metadata.maintainer_email);
    out.push_back({name(StructuredFeature::InvalidAuthorEmail), value(StructuredFeature::InvalidAuthorEmail), d});
  }
  {
    ordered_json d = ordered_json::array();
    for (const auto& m : result.install_commands) {
      ordered_json r;
      r["filepath"] = m.filepath;
      r["lineno"] = std::to_string(m.lineno);
      r["pattern"] = m.pattern;
      r["line"] = m.line_text;
      d.push_back(r);
    }
    out.push_back({name(StructuredFeature::InstallCommand), value(StructuredFeature::InstallCommand), d});
  }
  {
    ordered_json d = ordered_json::array();
    for (const auto& u : result.scan.urls) {
      if (!url_is_suspicious(u, allowlist)) continue;
      ordered_json r;
      r["url"] = u.url;
      r["filepath"] = u.filepath;
      r["lineno"] = std::to_string(u.lineno);
      d.push_back(r);
    }
    out.push_back({name(StructuredFeature::SuspiciousUrl), value(StructuredFeature::SuspiciousUrl), d});
  }
  {
    ordered_json d = ordered_json::array();
    for (const auto& l : result.scan.long_strings) {
      ordered_json r;
      r["filepath"] = l.filepath;
      r["lineno"] = std::to_string(l.lineno);
      r["length"] = l.length;
      d.push_back(r);
    }
    out.push_back({name(StructuredFeature::LongString), value(StructuredFeature::LongString), d});
  }
  {
    ordered_json d;
    d["present"] = result.setup_cfg.present;
    d["parsed"] = result.setup_cfg.parsed;
    d["sections"] = result.setup_cfg.sections;
    d["meaningful_keys"] = result.setup_cfg.meaningful_keys;
    out.push_back({name(StructuredFeature::MinimumSetupConfig), value(StructuredFeature::MinimumSetupConfig), d});
  }
  {
    ordered_json d;
    d["field"] = license_json(result.license.from_field);
    d["classifier"] = license_json(result.license.from_classifier);
    d["file"] = license_json(result.license.from_file);
    out.push_back({name(StructuredFeature::MismatchLicense), value(StructuredFeature::MismatchLicense), d});
  }
  {
    ordered_json d = ordered_json::array();
    for (const auto& l : result.scan.suspicious) {
      ordered_json r;
      r["filepath"] = l.filepath;
      r["api_name"] = l.api_name;
      r["lineno"] = std::to_string(l.lineno);
      d.push_back(r);
    }
    out.push_back({"suspicious_api_calls", !result.scan.suspicious.empty(), d});
  }
  return out;
}

std::string VetReport::to_json() const {
  ordered_json j;
  j["package"] = package;
  j["verdict"] = std::string(to_string(verdict));
  j["score"] = score;
  ordered_json ev = ordered_json::array();
  for (const auto& e : evidence) {
    ordered_json r;
    r["feature"] = e.feature;
    r["value"] = e.value;
    r["details"] = e.details;
    ev.push_back(r);
  }
  j["evidence"] = ev;
  j["model_version"] = model_version;
  j["tool_version"] = tool_version;
  return j.dump();
}

std::string VetReport::to_text() const {
  std::string out = package + ": " + (verdict == Label::Malicious ? "MALICIOUS" : "benign") + " (score " +
                    format_score(score) + ")\n";
  for (const auto& e : evidence) {
    if (!e.value) continue;
    out += "  " + e.feature;
    if (e.details.is_array()) {
      for (const auto& r : e.details) {
        out += "\n    ";
        if (r.contains("url")) out += r["url"].get<std::string>() + " at ";
        out += r["filepath"].get<std::string>() + ":" + r["lineno"].get<std::string>();
        if (r.contains("api_name")) out += " " + r["api_name"].get<std::string>();
        if (r.contains("pattern")) out += " " + r["pattern"].get<std::string>();
        if (r.contains("length")) out += " length " + std::to_string(r["length"].get<std::size_t>());
      }
    } else {
      out += " " + e.details.dump();
    }
    out += "\n";
  }
  return out;
}

VetReport vet_package(const TrainedModel& model, const PackageSnapshot& snapshot, const std::string& id,
                      const ExtractionConfig& cfg) {
  auto result = extract_features(snapshot, cfg, &model.vocab);
  auto pred = predict(model, result.vector);
  VetReport report;
  report.package = id;
  report.verdict = pred.label;
  report.score = pred.score;
  report.evidence = collect_evidence(result, cfg.domains());
  report.model_version = "SDSM/" + std::to_string(model.format_version) + " " + std::string(to_string(model.kind)) +
                         "/" + std::string(to_string(model.feature_set));
  return report;
}

// ---------------------------------------------------------------------------
// commands

namespace {

std::string error_json(const std::string* package, const std::exception& e) {
  ordered_json j;
  if (package) j["package"] = *package;
  const auto* err = dynamic_cast<const Error*>(&e);
  j["error"] = err ? std::string(to_string(err->code())) : std::string("Error");
  j["message"] = e.what();
  return j.dump();
}

/// Precedence: command flag, config file, SENTINEL_ALLOWLIST, bundled list.
void apply_allowlist(CliConfig& cfg, const std::string& flag) {
  if (!flag.empty()) {
    cfg.allowlist = fs::path(flag);
  } else if (!cfg.allowlist) {
    if (const char* env = std::getenv("SENTINEL_ALLOWLIST"); env && *env) {
      cfg.allowlist = fs::path(env);
    }
  }
}

CliConfig config_from(const std::string& path) { return path.empty() ? CliConfig{} : load_cli_config(path); }

std::string metrics_row(std::string_view label, const MetricsReport& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %9.4f %9.4f %9.4f %13.4f %10.4f\n", std::string(label).c_str(),
                m.overall.precision, m.overall.recall, m.overall.f1, m.malicious.f1, m.benign.f1);
  return buf;
}

std::string metrics_header() {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %13s %10s\n", "features", "precision", "recall", "f1",
                "malicious_f1", "benign_f1");
  return buf;
}

struct VetOptions {
  std::vector<std::string> paths;
  std::string model;
  std::string allowlist;
  bool json = false;
  std::size_t jobs = 0;
};

int cmd_vet(const VetOptions& o, std::ostream& out, std::ostream& err) {
  TrainedModel model;
  ExtractionConfig cfg;
  try {
    model = load_model(o.model);
    CliConfig cli;
    apply_allowlist(cli, o.allowlist);
    cfg = model.extraction_config();
    if (cli.allowlist) {
      cfg.allowlist = std::make_shared<const DomainAllowlist>(DomainAllowlist::load(*cli.allowlist));
    }
  } catch (const std::exception& e) {
    if (o.json) out << error_json(nullptr, e) << "\n";
    else err << "sentinel: error: " << e.what() << "\n";
    return kExitError;
  }

  struct Outcome {
    std::optional<VetReport> report;
    std::string error_line;
    std::string error_text;
  };
  std::vector<Outcome> outcomes(o.paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < o.paths.size(); i = next++) {
      const auto& p = o.paths[i];
      try {
        auto snap = open_package(p);
        outcomes[i].report = vet_package(model, snap, p, cfg);
      } catch (const std::exception& e) {
        outcomes[i].error_line = error_json(&p, e);
        outcomes[i].error_text = p + ": error: " + e.what();
      }
    }
  };
  std::size_t jobs = o.jobs ? o.jobs : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(1, o.paths.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  bool failed = false;
  bool malicious = false;
  for (const auto& oc : outcomes) {
    if (oc.report) {
      malicious = malicious || oc.report->verdict == Label::Malicious;
      out << (o.json ? oc.report->to_json() + "\n" : oc.report->to_text());
    } else {
      failed = true;
      if (o.json) out << oc.error_line << "\n";
      else err << oc.error_text << "\n";
    }
  }
  if (failed) return kExitError;
  return malicious ? kExitMalicious : kExitClean;
}

struct TrainOptions {
  std::string manifest, config, out, learner, feature_set, allowlist;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
  auto cli = config_from(o.config);
  apply_allowlist(cli, o.allowlist);
  if (!o.learner.empty()) cli.learner = model_kind_from_string(o.learner);
  if (!o.feature_set.empty()) cli.feature_set = feature_set_from_string(o.feature_set);
  auto extraction = cli.extraction();
  auto records = extract_dataset(o.manifest, extraction);
  auto model = train_model(records, cli.learner, cli.feature_set, cli.hyperparams, extraction, o.seed);
  save_model(model, o.out);

  auto x = design_matrix(records, model.vocab, model.tokenizer.mode, model.feature_set);
  std::vector<int> pred(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    pred[i] = predict_input(model, x.row(i)).label == Label::Malicious ? 1 : 0;
  }
  auto y = label_vector(records);
  auto m = compute_metrics(y, pred);
  out << "packages: " << records.size() << " (malicious " << m.support_malicious << ", benign " << m.support_benign
      << ")\n"
      << "learner: " << to_string(model.kind) << " on " << to_string(model.feature_set) << " features\n"
      << "vocabulary: " << model.vocab.size() << " tokens\n"
      << "resubstitution:\n"
      << metrics_header() << metrics_row(to_string(model.feature_set), m) << "model: " << o.out << "\n";
  return kExitClean;
}

struct EvaluateOptions {
  std::string manifest, config, learner, feature_set, allowlist, report;
  std::size_t folds = 10, repeats = 10;
  std::uint64_t seed = 0;
  bool json = false;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  auto cli = config_from(o.config);
  apply_allowlist(cli, o.allowlist);
  if (!o.learner.empty()) cli.learner = model_kind_from_string(o.learner);
  std::vector<FeatureSet> rows = cli.ablation;
  if (!o.feature_set.empty() || rows.empty()) {
    rows = {o.feature_set.empty() ? cli.feature_set : feature_set_from_string(o.feature_set)};
  }
  auto records = extract_dataset(o.manifest, cli.extraction());
  std::string jsonl;
  std::string table = metrics_header();
  for (auto set : rows) {
    PipelineConfig pc{cli.learner, set, cli.hyperparams, cli.tokenizer};
    auto report = evaluate_cv(records, pc, o.folds, o.repeats, o.seed);
    jsonl += ordered_json::parse(cv_report_json(report)).dump() + "\n";
    table += metrics_row(to_string(set), report.averaged);
  }
  if (!o.report.empty()) write_file(o.report, jsonl);
  if (o.json) {
    out << jsonl;
  } else {
    out << to_string(cli.learner) << ", stratified " << o.folds << "-fold x " << o.repeats << " repeats, seed "
        << o.seed << "\n"
        << table;
  }
  return kExitClean;
}

struct ImportanceOptions {
  std::string model, manifest, allowlist, report;
  std::size_t repeats = 10, top_k = 50;
  std::uint64_t seed = 0;
  bool json = false;
};

int cmd_importance(const ImportanceOptions& o, std::ostream& out) {
  auto model = load_model(o.model);
  auto cfg = model.extraction_config();
  CliConfig cli;
  apply_allowlist(cli, o.allowlist);
  if (cli.allowlist) cfg.allowlist = std::make_shared<const DomainAllowlist>(DomainAllowlist::load(*cli.allowlist));
  auto records = extract_dataset(o.manifest, cfg);
  auto report = permutation_importance(model, records, o.repeats, o.seed, o.top_k);
  auto json = importance_report_json(report);
  if (!o.report.empty()) write_file(o.report, json);
  if (o.json) {
    out << ordered_json::parse(json).dump() << "\n";
    return kExitClean;
  }
  out << "baseline f1: " << format_score(report.baseline) << " (" << report.repeats << " repeats)\n";
  char buf[200];
  std::snprintf(buf, sizeof buf, "%4s  %-32s %12s %10s\n", "rank", "feature", "mean_delta", "std");
  out << buf;
  for (std::size_t i = 0; i < report.features.size(); ++i) {
    const auto& f = report.features[i];
    std::snprintf(buf, sizeof buf, "%4zu  %-32s %12.4f %10.4f\n", i + 1,
                  (f.structured ? f.name : "token:" + f.name).c_str(), f.mean_delta, f.std_delta);
    out << buf;
  }
  return kExitClean;
}

struct ExtractOptions {
  std::string path, config, allowlist;
  bool json = false;
};

int cmd_extract(const ExtractOptions& o, std::ostream& out) {
  auto cli = config_from(o.config);
  apply_allowlist(cli, o.allowlist);
  auto cfg = cli.extraction();
  auto snap = open_package(o.path);
  auto result = extract_features(snap, cfg);
  auto evidence = collect_evidence(result, cfg.domains());
  const auto& names = structured_feature_names();
  if (o.json) {
    ordered_json j;
    j["package"] = o.path;
    ordered_json s;
    for (std::size_t i = 0; i < kStructuredCount; ++i) s[std::string(names[i])] = result.vector.structured[i];
    j["structured"] = s;
    ordered_json ev = ordered_json::array();
    for (const auto& e : evidence) {
      ordered_json r;
      r["feature"] = e.feature;
      r["value"] = e.value;
      r["details"] = e.details;
      ev.push_back(r);
    }
    j["evidence"] = ev;
    j["suspicious_lines"] = evidence.back().details;
    j["tokens"] = result.tokens;
    out << j.dump() << "\n";
    return kExitClean;
  }
  out << "package: " << (snap.name.empty() ? o.path : snap.name + " " + snap.version) << "\n";
  out << "structured features:\n";
  for (std::size_t i = 0; i < kStructuredCount; ++i) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "  %-22s %s\n", std::string(names[i]).c_str(),
                  result.vector.structured[i] ? "true" : "false");
    out << buf;
  }
  out << "suspicious lines:\n";
  for (const auto& l : result.scan.suspicious) {
    out << "  " << l.filepath << ":" << l.lineno << " " << l.api_name << "  " << trim(l.line_text) << "\n";
  }
  out << "tokens (" << result.tokens.size() << "):";
  for (const auto& t : result.tokens) out << " " << t;
  out << "\n";
  for (const auto& d : result.scan.diagnostics) out << "note: " << d.format() << "\n";
  return kExitClean;
}

struct SynthOptions {
  std::size_t benign = 200, malicious = 40;
  double ambiguity = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  auto manifest = generate_corpus(o.benign, o.malicious, o.ambiguity, o.seed, o.out);
  out << (fs::path(o.out) / "manifest.jsonl").string() << " (" << manifest.entries.size() << " packages)\n";
  return kExitClean;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detects malicious Python packages from metadata, files, code and text features", "sentinel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  VetOptions vet;
  auto* vet_cmd = app.add_subcommand("vet", "Classify packages with a trained model");
  vet_cmd->add_option("paths", vet.paths, "Package archives or directories")->required();
  vet_cmd->add_option("--model", vet.model, "Model file")->required();
  vet_cmd->add_flag("--json", vet.json, "One JSON object per line");
  vet_cmd->add_option("--allowlist", vet.allowlist, "Domain allowlist file");
  vet_cmd->add_option("--jobs", vet.jobs, "Worker threads (0 = hardware concurrency)");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a labeled corpus");
  train_cmd->add_option("--manifest", train.manifest, "Corpus manifest (JSONL)")->required();
  train_cmd->add_option("--config", train.config, "INI config file");
  train_cmd->add_option("--out", train.out, "Model output path")->required();
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--learner", train.learner, "dt, rf, svm, mlp, nb or stacking");
  train_cmd->add_option("--feature-set", train.feature_set, "combined, structured or text");
  train_cmd->add_option("--allowlist", train.allowlist, "Domain allowlist file");

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Repeated stratified cross-validation");
  eval_cmd->add_option("--manifest", eval.manifest, "Corpus manifest (JSONL)")->required();
  eval_cmd->add_option("--config", eval.config, "INI config file");
  eval_cmd->add_option("--folds", eval.folds, "Folds per repeat")->capture_default_str();
  eval_cmd->add_option("--repeats", eval.repeats, "Repeats")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Random seed");
  eval_cmd->add_option("--learner", eval.learner, "dt, rf, svm, mlp, nb or stacking");
  eval_cmd->add_option("--feature-set", eval.feature_set, "combined, structured or text");
  eval_cmd->add_option("--allowlist", eval.allowlist, "Domain allowlist file");
  eval_cmd->add_option("--report", eval.report, "Write the JSONL report here");
  eval_cmd->add_flag("--json", eval.json, "One JSON report per line");

  ImportanceOptions imp;
  auto* imp_cmd = app.add_subcommand("importance", "Permutation feature importance");
  imp_cmd->add_option("--model", imp.model, "Model file")->required();
  imp_cmd->add_option("--manifest", imp.manifest, "Corpus manifest (JSONL)")->required();
  imp_cmd->add_option("--repeats", imp.repeats, "Permutations per feature")->capture_default_str();
  imp_cmd->add_option("--top-k", imp.top_k, "Token columns to permute")->capture_default_str();
  imp_cmd->add_option("--seed", imp.seed, "Random seed");
  imp_cmd->add_option("--allowlist", imp.allowlist, "Domain allowlist file");
  imp_cmd->add_option("--report", imp.report, "Write the JSON report here");
  imp_cmd->add_flag("--json", imp.json, "JSON on one line");

  ExtractOptions ext;
  auto* ext_cmd = app.add_subcommand("extract", "Print the features of one package");
  ext_cmd->add_option("path", ext.path, "Package archive or directory")->required();
  ext_cmd->add_option("--config", ext.config, "INI config file");
  ext_cmd->add_option("--allowlist", ext.allowlist, "Domain allowlist file");
  ext_cmd->add_flag("--json", ext.json, "JSON on one line");

  SynthOptions syn;
  auto* syn_cmd = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  syn_cmd->add_option("--benign", syn.benign, "Benign packages")->capture_default_str();
  syn_cmd->add_option("--malicious", syn.malicious, "Malicious packages")->capture_default_str();
  syn_cmd->add_option("--ambiguity", syn.ambiguity, "Share of packages borrowing traits of the other class")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  syn_cmd->add_option("--seed", syn.seed, "Random seed");
  syn_cmd->add_option("--out", syn.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitClean : kExitError;
  }

  const bool json = (vet_cmd->parsed() && vet.json) || (ext_cmd->parsed() && ext.json) ||
                    (eval_cmd->parsed() && eval.json) || (imp_cmd->parsed() && imp.json);
  try {
    if (vet_cmd->parsed()) return cmd_vet(vet, out, err);
    if (train_cmd->parsed()) return cmd_train(train, out);
    if (eval_cmd->parsed()) return cmd_evaluate(eval, out);
    if (imp_cmd->parsed()) return cmd_importance(imp, out);
    if (ext_cmd->parsed()) return cmd_extract(ext, out);
    if (syn_cmd->parsed()) return cmd_synth(syn, out);
  } catch (const std::exception& e) {
    if (json) {
      const std::string* pkg = ext_cmd->parsed() ? &ext.path : nullptr;
      out << error_json(pkg, e) << "\n";
    } else {
      err << "sentinel: error: " << e.what() << "\n";
    }
    return kExitError;
  }
  return kExitError;
}

} // namespace sentinel

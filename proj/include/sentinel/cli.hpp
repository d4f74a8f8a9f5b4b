#pragma once

#include "sentinel/features.hpp"
#include "sentinel/ml/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Process exit codes; nothing else is ever returned.
enum ExitCode : int { kExitClean = 0, kExitError = 2, kExitMalicious = 3 };

/// Settings read from an INI config file. Sections: [tokenizer], [scan],
/// [hyperparams], [extraction], [model], [ablation].
struct CliConfig {
  TokenizerConfig tokenizer;
  ScanConfig scan = ScanConfig::defaults();
  Hyperparams hyperparams;
  std::size_t min_setup_keys = 3;
  std::optional<std::filesystem::path> allowlist;
  ModelKind learner = ModelKind::Stacking;
  FeatureSet feature_set = FeatureSet::Combined;
  /// Feature sets evaluated as separate rows, in the listed order.
  std::vector<FeatureSet> ablation;

  ExtractionConfig extraction() const;
};

/// Throws Error(ConfigError) on unknown sections, unknown keys or bad values.
CliConfig parse_cli_config(std::string_view text);
CliConfig load_cli_config(const std::filesystem::path& path);

struct Evidence {
  std::string feature;
  bool value = false;
  nlohmann::ordered_json details;
};

/// Evidence for every structured feature in column order, then the suspicious calls.
std::vector<Evidence> collect_evidence(const ExtractionResult& result, const DomainAllowlist& allowlist);

struct VetReport {
  std::string package;
  Label verdict = Label::Benign;
  double score = 0.0;
  std::vector<Evidence> evidence;
  std::string model_version;
  std::string tool_version{kToolVersion};

  /// Single-line JSON object.
  std::string to_json() const;
  std::string to_text() const;
};

VetReport vet_package(const TrainedModel& model, const PackageSnapshot& snapshot, const std::string& id,
                      const ExtractionConfig& cfg);

/// Entry point behind the `sentinel` executable; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sentinel

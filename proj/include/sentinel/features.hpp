#pragma once

#include "sentinel/archive.hpp"
#include "sentinel/codescan.hpp"
#include "sentinel/filefeat.hpp"
#include "sentinel/metadata.hpp"
#include "sentinel/textfeat.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

inline constexpr std::size_t kStructuredCount = 7;

enum class StructuredFeature {
  InvalidHomepage,
  InvalidAuthorEmail,
  InstallCommand,
  SuspiciousUrl,
  LongString,
  MinimumSetupConfig,
  MismatchLicense,
};

/// Stable snake_case column names in structured order.
const std::array<std::string_view, kStructuredCount>& structured_feature_names();

using StructuredVector = std::array<bool, kStructuredCount>;

enum class Label { Benign = 0, Malicious = 1 };

std::string_view to_string(Label label);
/// Accepts `malicious`/`benign` (any case) or `1`/`0`; throws Error(InvalidArgument).
Label label_from_string(std::string_view text);

struct FeatureVector {
  StructuredVector structured{};
  std::vector<double> text;

  /// Structured booleans as 0/1 followed by the text vector.
  std::vector<double> flat() const;
  bool operator==(const FeatureVector&) const = default;
};

struct ExtractionConfig {
  ScanConfig scan = ScanConfig::defaults();
  TokenizerConfig tokenizer;
  std::size_t min_setup_keys = 3;
  /// Null means the bundled allowlist.
  std::shared_ptr<const DomainAllowlist> allowlist;

  const DomainAllowlist& domains() const;
  void validate() const;
};

/// Metadata from the shallowest PKG-INFO/METADATA, empty when absent.
PackageMetadata package_metadata(const PackageSnapshot& snapshot);

struct ExtractionResult {
  FeatureVector vector;
  PackageMetadata metadata;
  LicenseEvidence license;
  SetupCfgSummary setup_cfg;
  ScanResult scan;
  std::vector<InstallCommandMatch> install_commands;
  TextFeature text;
  std::vector<std::string> tokens;
};

/// Runs every extractor. The text vector is filled only when a vocabulary is given.
ExtractionResult extract_features(const PackageSnapshot& snapshot, const ExtractionConfig& cfg,
                                  const Vocabulary* vocab = nullptr);

/// One package with raw tokens, so vocabularies can be refit per fold.
struct DatasetRecord {
  std::string id;
  Label label = Label::Benign;
  StructuredVector structured{};
  std::vector<std::string> tokens;

  bool operator==(const DatasetRecord&) const = default;
};

struct LabeledExample {
  std::string id;
  FeatureVector vector;
  Label label = Label::Benign;
};

struct PearsonResult {
  std::array<std::array<double, kStructuredCount>, kStructuredCount> r{};
  std::array<bool, kStructuredCount> constant{};
};

/// Throws Error(TooFewExamples) for fewer than two rows.
PearsonResult pearson_matrix(std::span<const StructuredVector> rows);
PearsonResult pearson_matrix(std::span<const LabeledExample> dataset);
PearsonResult pearson_matrix(std::span<const DatasetRecord> dataset);

void write_dataset_jsonl(std::ostream& out, std::span<const DatasetRecord> records);
/// Throws Error(Corrupt) with the line number on malformed input.
std::vector<DatasetRecord> read_dataset_jsonl(std::istream& in);

} // namespace sentinel

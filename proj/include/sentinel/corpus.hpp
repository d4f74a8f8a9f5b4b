#pragma once

#include "sentinel/archive.hpp"
#include "sentinel/features.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

/// Package properties that each switch on exactly one structured feature.
enum class Trait { NoHomepage, BadEmail, InstallHook, HttpIpUrl, LongB64String, MinimalCfg, LicenseClash };

inline constexpr std::size_t kTraitCount = 7;
std::string_view to_string(Trait trait);
Trait trait_from_string(std::string_view name);
const std::vector<Trait>& all_traits();
/// The structured feature a trait switches on.
StructuredFeature trait_feature(Trait trait);
/// Structured vector implied by a trait set.
StructuredVector expected_structured(const std::set<Trait>& traits);

struct TraitSpec {
  Label label = Label::Benign;
  std::set<Trait> traits;
  /// APIs called from package code. Malicious packages get payload-style calls,
  /// benign ones get ordinary library usage.
  std::vector<std::string> suspicious_apis;
  std::size_t noise_modules = 2;
  std::uint64_t seed = 0;
  /// Derived from the seed when empty.
  std::string name;
};

/// Archive members (under `name-version/`) for a spec; pure function of the spec.
std::vector<ArchiveMember> synth_members(const TraitSpec& spec);
/// File stem `name-version` for a spec.
std::string synth_stem(const TraitSpec& spec);
/// Writes `<out_dir>/<name>-<version>.tar.gz` and returns its path. Throws Error(IoError).
std::filesystem::path synth_package(const TraitSpec& spec, const std::filesystem::path& out_dir);

struct ManifestEntry {
  std::string path; ///< relative to the manifest directory, or absolute
  Label label = Label::Benign;

  bool operator==(const ManifestEntry&) const = default;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  bool operator==(const CorpusManifest&) const = default;
};

/// Per-package specs of a generated corpus, in manifest order.
std::vector<TraitSpec> corpus_specs(std::size_t n_benign, std::size_t n_malicious, double ambiguity,
                                    std::uint64_t seed);

/// Writes packages to `<out_dir>/packages/` and the manifest to `<out_dir>/manifest.jsonl`.
/// floor(n * ambiguity) packages of each class borrow traits from the other class.
CorpusManifest generate_corpus(std::size_t n_benign, std::size_t n_malicious, double ambiguity, std::uint64_t seed,
                               const std::filesystem::path& out_dir);

std::string manifest_jsonl(const CorpusManifest& manifest);
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
/// Throws Error(IoError) or Error(Corrupt) with the line number.
CorpusManifest read_manifest(const std::filesystem::path& path);

struct LabeledPackage {
  std::string id; ///< manifest path
  PackageSnapshot snapshot;
  Label label = Label::Benign;
};

/// Opens every manifest entry in order; errors name the offending path.
std::vector<LabeledPackage> load_labeled_corpus(const std::filesystem::path& manifest_path,
                                                const SizeLimits& limits = {});

/// Extracts structured features and raw tokens for every manifest entry.
std::vector<DatasetRecord> extract_dataset(const std::filesystem::path& manifest_path, const ExtractionConfig& cfg,
                                           const SizeLimits& limits = {});

} // namespace sentinel

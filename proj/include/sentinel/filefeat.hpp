#pragma once

#include "sentinel/archive.hpp"
#include "sentinel/metadata.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sentinel {

enum class CanonicalLicense { MIT, BSD, Apache2, GPL, LGPL, MPL, ISC, Unlicense, Proprietary, Other };

std::string_view to_string(CanonicalLicense license);
std::optional<CanonicalLicense> canonical_license_from_string(std::string_view name);

/// Ordered keyword table mapping license text to a canonical family.
class LicenseTable {
public:
  /// Lines of the form `Canonical: kw | kw | ...`; throws Error(ConfigError).
  static LicenseTable from_text(std::string_view text);
  static const LicenseTable& bundled();

  /// Earliest keyword occurrence decides (table order breaks ties); no hit gives Other.
  CanonicalLicense canonicalize(std::string_view raw) const;

private:
  std::vector<std::pair<CanonicalLicense, std::string>> keywords_;
};

CanonicalLicense canonicalize_license(std::string_view raw, const LicenseTable& table = LicenseTable::bundled());

struct LicenseEvidence {
  std::optional<CanonicalLicense> from_field;
  std::optional<CanonicalLicense> from_classifier;
  std::optional<CanonicalLicense> from_file;

  bool operator==(const LicenseEvidence&) const = default;
};

/// Placeholder values such as `UNKNOWN` count as an absent position.
LicenseEvidence extract_license_positions(const PackageSnapshot& snapshot, const PackageMetadata& md,
                                          const LicenseTable& table = LicenseTable::bundled());

/// True when no position is present or the present ones disagree.
bool feature_mismatch_license(const LicenseEvidence& evidence);

struct SetupCfgSummary {
  bool present = false;
  bool parsed = false;
  std::vector<std::string> sections;
  std::size_t meaningful_keys = 0; ///< assignments outside [egg_info]
};

SetupCfgSummary summarize_setup_cfg(std::string_view content);
SetupCfgSummary summarize_setup_cfg(const PackageSnapshot& snapshot);

bool feature_minimum_setup_config(const SetupCfgSummary& summary, std::size_t min_meaningful_keys = 3);
bool feature_minimum_setup_config(const PackageSnapshot& snapshot, std::size_t min_meaningful_keys = 3);

} // namespace sentinel

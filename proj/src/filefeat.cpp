#include "sentinel/filefeat.hpp"

#include "sentinel/error.hpp"
#include "sentinel/ini.hpp"
#include "sentinel/resources.hpp"
#include "sentinel/text.hpp"

#include <array>
#include <cctype>
#include <set>

namespace sentinel {

namespace {

constexpr std::array<std::pair<CanonicalLicense, std::string_view>, 10> kNames{{
    {CanonicalLicense::MIT, "MIT"},
    {CanonicalLicense::BSD, "BSD"},
    {CanonicalLicense::Apache2, "Apache-2.0"},
    {CanonicalLicense::GPL, "GPL"},
    {CanonicalLicense::LGPL, "LGPL"},
    {CanonicalLicense::MPL, "MPL"},
    {CanonicalLicense::ISC, "ISC"},
    {CanonicalLicense::Unlicense, "Unlicense"},
    {CanonicalLicense::Proprietary, "Proprietary"},
    {CanonicalLicense::Other, "Other"},
}};

constexpr std::size_t kLicenseFilePrefix = 4096;

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Lowercases and collapses whitespace runs so wrapped license text matches.
std::string normalize_for_match(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) {
      out.push_back(' ');
      space = false;
    }
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::size_t find_word(std::string_view text, std::string_view word) {
  std::size_t pos = 0;
  while ((pos = text.find(word, pos)) != std::string_view::npos) {
    bool left = pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(word.front());
    std::size_t end = pos + word.size();
    bool right = end == text.size() || !is_word_char(text[end]) || !is_word_char(word.back());
    if (left && right) {
      return pos;
    }
    ++pos;
  }
  return std::string_view::npos;
}

bool is_placeholder(std::string_view value) {
  auto v = trim(value);
  return v.empty() || iequals(v, "UNKNOWN") || iequals(v, "none") || iequals(v, "n/a");
}

} // namespace

std::string_view to_string(CanonicalLicense license) {
  for (const auto& [id, name] : kNames) {
    if (id == license) {
      return name;
    }
  }
  return "Other";
}

std::optional<CanonicalLicense> canonical_license_from_string(std::string_view name) {
  for (const auto& [id, n] : kNames) {
    if (iequals(n, name)) {
      return id;
    }
  }
  return std::nullopt;
}

LicenseTable LicenseTable::from_text(std::string_view text) {
  LicenseTable table;
  for (const auto& line : parse_word_list(text)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "license table line lacks ':': " + line);
    }
    auto family = canonical_license_from_string(trim(std::string_view(line).substr(0, colon)));
    if (!family) {
      throw Error(ErrorCode::ConfigError, "unknown license family in table: " + line);
    }
    std::string_view rest = std::string_view(line).substr(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto bar = rest.find('|', start);
      if (bar == std::string_view::npos) {
        bar = rest.size();
      }
      auto kw = normalize_for_match(trim(rest.substr(start, bar - start)));
      if (!kw.empty()) {
        table.keywords_.emplace_back(*family, std::move(kw));
      }
      start = bar + 1;
    }
  }
  return table;
}

const LicenseTable& LicenseTable::bundled() {
  static const LicenseTable table = from_text(resources::licenses());
  return table;
}

CanonicalLicense LicenseTable::canonicalize(std::string_view raw) const {
  auto text = normalize_for_match(raw);
  std::size_t best_pos = std::string::npos;
  CanonicalLicense best = CanonicalLicense::Other;
  for (const auto& [family, keyword] : keywords_) {
    auto pos = find_word(text, keyword);
    if (pos < best_pos) {
      best_pos = pos;
      best = family;
    }
  }
  return best;
}

CanonicalLicense canonicalize_license(std::string_view raw, const LicenseTable& table) {
  return table.canonicalize(raw);
}

LicenseEvidence extract_license_positions(const PackageSnapshot& snapshot, const PackageMetadata& md,
                                          const LicenseTable& table) {
  LicenseEvidence ev;
  if (md.license_field && !is_placeholder(*md.license_field)) {
    ev.from_field = table.canonicalize(*md.license_field);
  }
  if (!md.license_classifiers.empty()) {
    // Drop the "License ::" stem so only the family part is matched.
    std::string_view c = md.license_classifiers.front();
    c.remove_prefix(std::min<std::size_t>(c.size(), std::string_view("License ::").size()));
    ev.from_classifier = table.canonicalize(c);
  }
  if (const FileEntry* file = snapshot.first_of_kind(FileKind::LicenseFile)) {
    auto head = decode_utf8_lossy(std::string_view(file->content).substr(0, kLicenseFilePrefix));
    if (!trim(head).empty()) {
      ev.from_file = table.canonicalize(head);
    }
  }
  return ev;
}

bool feature_mismatch_license(const LicenseEvidence& ev) {
  std::set<CanonicalLicense> present;
  for (const auto* pos : {&ev.from_field, &ev.from_classifier, &ev.from_file}) {
    if (*pos) {
      present.insert(**pos);
    }
  }
  return present.empty() || present.size() > 1;
}

SetupCfgSummary summarize_setup_cfg(std::string_view content) {
  SetupCfgSummary summary;
  summary.present = true;
  auto doc = try_parse_ini(decode_utf8_lossy(content));
  if (!doc) {
    return summary;
  }
  summary.parsed = true;
  for (const auto& section : doc->sections) {
    summary.sections.push_back(section.name);
    if (section.name != "egg_info") {
      summary.meaningful_keys += section.entries.size();
    }
  }
  return summary;
}

SetupCfgSummary summarize_setup_cfg(const PackageSnapshot& snapshot) {
  const FileEntry* cfg = snapshot.first_of_kind(FileKind::SetupCfg);
  if (cfg == nullptr) {
    return {};
  }
  return summarize_setup_cfg(cfg->content);
}

bool feature_minimum_setup_config(const SetupCfgSummary& summary, std::size_t min_meaningful_keys) {
  return !summary.present || !summary.parsed || summary.meaningful_keys < min_meaningful_keys;
}

bool feature_minimum_setup_config(const PackageSnapshot& snapshot, std::size_t min_meaningful_keys) {
  return feature_minimum_setup_config(summarize_setup_cfg(snapshot), min_meaningful_keys);
}

} // namespace sentinel

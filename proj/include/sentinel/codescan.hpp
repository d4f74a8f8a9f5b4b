#pragma once

#include "sentinel/archive.hpp"
#include "sentinel/metadata.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

struct TextFeature;

// ---------------------------------------------------------------------------
// lexer

struct StringLiteral {
  std::size_t start_line = 0; ///< 1-based
  std::size_t end_line = 0;
  std::size_t length = 0; ///< code points between the delimiters
  bool fstring = false;
  bool terminated = true;
};

struct IdentifierToken {
  std::string text;
  std::size_t line = 0; ///< 1-based
  std::size_t column = 0;
  bool followed_by_paren = false;
};

struct LexDiagnostic {
  std::size_t line = 0;
  std::string message;
};

/// Token view of Python source. `code_lines` mirror the source lines with
/// string interiors and comments removed (delimiters kept).
struct LexedSource {
  std::vector<std::string> lines;
  std::vector<std::string> code_lines;
  std::vector<StringLiteral> literals;
  std::vector<IdentifierToken> identifiers;
  std::vector<LexDiagnostic> diagnostics;
};

LexedSource lex_lines(std::string_view source);

// ---------------------------------------------------------------------------
// scanning

struct ScanConfig {
  std::set<std::string> api_list;
  std::size_t long_string_threshold = 40;
  std::set<std::string> scan_extensions{".py"};

  /// Bundled API list, threshold 40, `.py` only.
  static ScanConfig defaults();
  /// Throws Error(ConfigError) when the API list is empty or the threshold is 0.
  void validate() const;
};

/// One call site of a listed API, in the shape of a static-analysis report record.
struct SuspiciousLine {
  std::string filepath;
  std::size_t lineno = 0;
  std::string api_name;
  std::string line_text;

  auto operator<=>(const SuspiciousLine&) const = default;
};

struct UrlOccurrence {
  std::string url;
  std::string scheme; ///< http, https or ftp
  std::string host;   ///< lowercase
  bool is_ip = false;
  std::string filepath;
  std::size_t lineno = 0;

  auto operator<=>(const UrlOccurrence&) const = default;
};

struct LongString {
  std::string filepath;
  std::size_t lineno = 0;
  std::size_t length = 0;
};

struct ScanDiagnostic {
  std::string filepath;
  std::size_t line = 0;
  std::string message;

  /// `file:line: message`
  std::string format() const;
};

struct ScanResult {
  std::vector<SuspiciousLine> suspicious; ///< sorted (filepath, lineno, api_name)
  std::vector<UrlOccurrence> urls;        ///< sorted (filepath, lineno, url)
  std::vector<LongString> long_strings;   ///< literals above the threshold
  std::size_t max_literal_length = 0;
  std::vector<ScanDiagnostic> diagnostics;
};

bool is_scanned_file(const FileEntry& entry, const ScanConfig& cfg);

/// Lexes every scanned file once and collects all code-level evidence.
ScanResult scan_package(const PackageSnapshot& snapshot, const ScanConfig& cfg);

std::vector<SuspiciousLine> scan_suspicious_apis(const PackageSnapshot& snapshot, const ScanConfig& cfg);
bool feature_long_string(const PackageSnapshot& snapshot, const ScanConfig& cfg);

/// URL and bare-IP occurrences in one line of text.
std::vector<UrlOccurrence> find_urls_in_line(std::string_view line);
std::vector<UrlOccurrence> extract_urls(const PackageSnapshot& snapshot, const ScanConfig& cfg = ScanConfig::defaults());

bool url_is_suspicious(const UrlOccurrence& url, const DomainAllowlist& allowlist);
bool feature_suspicious_url(const PackageSnapshot& snapshot, const DomainAllowlist& allowlist,
                            const ScanConfig& cfg = ScanConfig::defaults());

struct InstallCommandMatch {
  std::string filepath;
  std::size_t lineno = 0;
  std::string line_text;
  std::string pattern;
};

std::vector<InstallCommandMatch> find_install_commands(const TextFeature& text);
bool feature_install_command(const TextFeature& text);

} // namespace sentinel

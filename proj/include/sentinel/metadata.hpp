#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sentinel {

/// Headers of a PKG-INFO / METADATA file relevant to the metadata features.
struct PackageMetadata {
  std::string name;
  std::string version;
  std::optional<std::string> author_email;
  std::optional<std::string> maintainer_email;
  std::optional<std::string> homepage;
  std::vector<std::string> project_urls;
  std::optional<std::string> license_field;
  std::vector<std::string> license_classifiers; ///< full `License :: ...` lines

  bool operator==(const PackageMetadata&) const = default;
};

/// Never fails; stops at the first blank line, ignores unknown headers.
PackageMetadata parse_pkg_info(std::string_view content);

/// Public-suffix rules (normal, `*.` wildcard and `!` exception rules).
class PublicSuffixList {
public:
  explicit PublicSuffixList(std::string_view rules_text);
  static const PublicSuffixList& bundled();

  /// Registrable domain (public suffix plus one label); nullopt when the host
  /// is itself a public suffix or empty.
  std::optional<std::string> registrable_domain(std::string_view host) const;

private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;  ///< rule "*.x" stored as "x"
  std::unordered_set<std::string> exceptions_; ///< rule "!a.x" stored as "a.x"
};

class TldList {
public:
  explicit TldList(std::string_view text);
  static const TldList& bundled();
  bool contains(std::string_view tld) const;
  std::size_t size() const noexcept { return tlds_.size(); }

private:
  std::unordered_set<std::string> tlds_;
};

/// Set of popular registrable domains. Read-only after construction.
class DomainAllowlist {
public:
  /// Throws Error(ConfigError) when empty or when an entry carries a scheme or path.
  static DomainAllowlist from_text(std::string_view text);
  static DomainAllowlist load(const std::filesystem::path& path);
  static const DomainAllowlist& bundled();

  bool contains(std::string_view domain) const;
  /// True when the host's registrable domain (or the host itself) is listed.
  bool allows_host(std::string_view host) const;
  std::size_t size() const noexcept { return domains_.size(); }

private:
  std::unordered_set<std::string> domains_;
};

struct ParsedUrl {
  std::string scheme; ///< lowercase
  std::string host;   ///< lowercase, no port, no brackets
  std::optional<unsigned> port;
  std::string path;
};

std::optional<ParsedUrl> parse_url(std::string_view url);
bool is_dotted_quad(std::string_view host);
bool is_ip_literal(std::string_view host);

/// Offline check: one `@`, non-empty local part, dotted domain of
/// alphanumeric-or-hyphen labels, final label in the bundled TLD list.
bool email_is_valid(std::string_view email);
/// Splits a header such as `"A" <a@x.org>, b@y.org` into bare addresses.
std::vector<std::string> extract_email_addresses(std::string_view field);

bool homepage_is_valid(std::string_view url, const DomainAllowlist& allowlist);

bool feature_invalid_homepage(const PackageMetadata& md, const DomainAllowlist& allowlist);
bool feature_invalid_author_email(const PackageMetadata& md);

} // namespace sentinel

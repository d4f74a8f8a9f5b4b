#include "sentinel/metadata.hpp"

#include "sentinel/error.hpp"
#include "sentinel/resources.hpp"
#include "sentinel/text.hpp"

#include <algorithm>
#include <cctype>

namespace sentinel {

PackageMetadata parse_pkg_info(std::string_view content) {
  PackageMetadata md;
  std::string text = decode_utf8_lossy(content);
  std::vector<std::pair<std::string, std::string>> headers;
  for (auto line : split_lines(text)) {
    if (trim(line).empty()) {
      break;
    }
    if ((line.front() == ' ' || line.front() == '\t')) {
      if (!headers.empty()) {
        headers.back().second += ' ';
        headers.back().second += trim(line);
      }
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      continue;
    }
    headers.emplace_back(ascii_lower(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1))));
  }

  std::optional<std::string> license_expression;
  for (auto& [key, value] : headers) {
    if (key == "name") {
      md.name = value;
    } else if (key == "version") {
      md.version = value;
    } else if (key == "author-email") {
      md.author_email = value;
    } else if (key == "maintainer-email") {
      md.maintainer_email = value;
    } else if (key == "home-page") {
      md.homepage = value;
    } else if (key == "project-url") {
      // "Label, https://..." as in core package metadata; bare URLs tolerated.
      auto comma = value.find(',');
      auto url = comma == std::string::npos ? std::string_view(value) : trim(std::string_view(value).substr(comma + 1));
      if (!url.empty()) {
        md.project_urls.emplace_back(url);
      }
    } else if (key == "license") {
      md.license_field = value;
    } else if (key == "license-expression") {
      license_expression = value;
    } else if (key == "classifier") {
      if (value.rfind("License ::", 0) == 0) {
        md.license_classifiers.push_back(value);
      }
    }
  }
  if (!md.license_field && license_expression) {
    md.license_field = license_expression;
  }
  return md;
}

// ---------------------------------------------------------------------------
// public suffix list

namespace {

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t start = 0;
  while (start <= host.size()) {
    auto dot = host.find('.', start);
    if (dot == std::string_view::npos) {
      dot = host.size();
    }
    labels.push_back(host.substr(start, dot - start));
    start = dot + 1;
  }
  return labels;
}

std::string join_labels(const std::vector<std::string_view>& labels, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < labels.size(); ++i) {
    if (i > from) {
      out += '.';
    }
    out += labels[i];
  }
  return out;
}

std::string normalize_host(std::string_view host) {
  std::string h = ascii_lower(trim(host));
  while (!h.empty() && h.back() == '.') {
    h.pop_back();
  }
  return h;
}

} // namespace

PublicSuffixList::PublicSuffixList(std::string_view rules_text) {
  for (auto& rule : parse_word_list(rules_text)) {
    auto r = ascii_lower(rule);
    if (r.rfind("//", 0) == 0) {
      continue;
    }
    if (r.front() == '!') {
      exceptions_.insert(r.substr(1));
    } else if (r.rfind("*.", 0) == 0) {
      wildcards_.insert(r.substr(2));
    } else {
      rules_.insert(r);
    }
  }
}

const PublicSuffixList& PublicSuffixList::bundled() {
  static const PublicSuffixList list(resources::public_suffix());
  return list;
}

std::optional<std::string> PublicSuffixList::registrable_domain(std::string_view host_in) const {
  std::string host = normalize_host(host_in);
  if (host.empty()) {
    return std::nullopt;
  }
  auto labels = split_labels(host);
  if (std::any_of(labels.begin(), labels.end(), [](std::string_view l) { return l.empty(); })) {
    return std::nullopt;
  }
  const std::size_t n = labels.size();
  // Exception rules prevail: the exception name itself is registrable.
  for (std::size_t i = 0; i < n; ++i) {
    if (exceptions_.contains(join_labels(labels, i))) {
      return join_labels(labels, i);
    }
  }
  std::size_t suffix_labels = 1; // implicit "*" rule
  for (std::size_t i = 0; i < n; ++i) {
    auto candidate = join_labels(labels, i);
    std::size_t len = 0;
    if (rules_.contains(candidate)) {
      len = n - i;
    }
    if (i >= 1 && wildcards_.contains(candidate)) {
      len = std::max(len, n - i + 1);
    }
    suffix_labels = std::max(suffix_labels, len);
  }
  if (suffix_labels >= n) {
    return std::nullopt;
  }
  return join_labels(labels, n - suffix_labels - 1);
}

TldList::TldList(std::string_view text) {
  for (auto& t : parse_word_list(text)) {
    tlds_.insert(ascii_lower(t));
  }
}

const TldList& TldList::bundled() {
  static const TldList list(resources::tlds());
  return list;
}

bool TldList::contains(std::string_view tld) const { return tlds_.contains(ascii_lower(tld)); }

// ---------------------------------------------------------------------------
// allowlist

DomainAllowlist DomainAllowlist::from_text(std::string_view text) {
  DomainAllowlist list;
  for (auto& entry : parse_word_list(text)) {
    auto d = normalize_host(entry);
    if (d.find("://") != std::string::npos || d.find('/') != std::string::npos) {
      throw Error(ErrorCode::ConfigError, "allowlist entry must be a bare domain: '" + entry + "'");
    }
    list.domains_.insert(std::move(d));
  }
  if (list.domains_.empty()) {
    throw Error(ErrorCode::ConfigError, "allowlist is empty");
  }
  return list;
}

DomainAllowlist DomainAllowlist::load(const std::filesystem::path& path) { return from_text(read_file(path)); }

const DomainAllowlist& DomainAllowlist::bundled() {
  static const DomainAllowlist list = from_text(resources::allowlist());
  return list;
}

bool DomainAllowlist::contains(std::string_view domain) const { return domains_.contains(normalize_host(domain)); }

bool DomainAllowlist::allows_host(std::string_view host) const {
  auto h = normalize_host(host);
  if (domains_.contains(h)) {
    return true;
  }
  auto reg = PublicSuffixList::bundled().registrable_domain(h);
  return reg && domains_.contains(*reg);
}

// ---------------------------------------------------------------------------
// urls

bool is_dotted_quad(std::string_view host) {
  int parts = 0;
  std::size_t start = 0;
  while (start <= host.size()) {
    auto dot = host.find('.', start);
    if (dot == std::string_view::npos) {
      dot = host.size();
    }
    auto part = host.substr(start, dot - start);
    if (part.empty() || part.size() > 3 ||
        !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return false;
    }
    if (std::stoi(std::string(part)) > 255) {
      return false;
    }
    ++parts;
    start = dot + 1;
  }
  return parts == 4;
}

bool is_ip_literal(std::string_view host) {
  return is_dotted_quad(host) || host.find(':') != std::string_view::npos;
}

std::optional<ParsedUrl> parse_url(std::string_view url_in) {
  auto url = trim(url_in);
  auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) {
    return std::nullopt;
  }
  ParsedUrl out;
  out.scheme = ascii_lower(url.substr(0, sep));
  if (!std::all_of(out.scheme.begin(), out.scheme.end(),
                   [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.'; })) {
    return std::nullopt;
  }
  auto rest = url.substr(sep + 3);
  auto end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, end);
  out.path = end == std::string_view::npos ? "" : std::string(rest.substr(end));
  if (auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  std::string_view host;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) {
      return std::nullopt;
    }
    host = authority.substr(1, close - 1);
    auto after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') {
        return std::nullopt;
      }
      port = after.substr(1);
    }
  } else {
    auto colon = authority.rfind(':');
    host = authority.substr(0, colon);
    if (colon != std::string_view::npos) {
      port = authority.substr(colon + 1);
    }
  }
  if (host.empty()) {
    return std::nullopt;
  }
  if (!port.empty()) {
    if (port.size() > 5 || !std::all_of(port.begin(), port.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    out.port = static_cast<unsigned>(std::stoul(std::string(port)));
  }
  out.host = normalize_host(host);
  for (char c : out.host) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == ':' ||
          static_cast<unsigned char>(c) >= 0x80)) {
      return std::nullopt;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// emails

bool email_is_valid(std::string_view email_in) {
  auto email = trim(email_in);
  auto at = email.find('@');
  if (at == std::string_view::npos || at == 0 || email.find('@', at + 1) != std::string_view::npos) {
    return false;
  }
  auto local = email.substr(0, at);
  if (std::any_of(local.begin(), local.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
    return false;
  }
  auto domain = email.substr(at + 1);
  if (domain.find('.') == std::string_view::npos) {
    return false;
  }
  auto labels = split_labels(domain);
  for (auto label : labels) {
    if (label.empty() || !std::all_of(label.begin(), label.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
        })) {
      return false;
    }
  }
  return TldList::bundled().contains(labels.back());
}

std::vector<std::string> extract_email_addresses(std::string_view field) {
  std::vector<std::string> out;
  std::size_t start = 0;
  bool quoted = false;
  auto flush = [&](std::string_view part) {
    part = trim(part);
    auto lt = part.find('<');
    auto gt = part.rfind('>');
    if (lt != std::string_view::npos && gt != std::string_view::npos && gt > lt) {
      part = trim(part.substr(lt + 1, gt - lt - 1));
    }
    if (!part.empty()) {
      out.emplace_back(part);
    }
  };
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] == '"') {
      quoted = !quoted;
    } else if (field[i] == ',' && !quoted) {
      flush(field.substr(start, i - start));
      start = i + 1;
    }
  }
  flush(field.substr(start));
  return out;
}

bool homepage_is_valid(std::string_view url, const DomainAllowlist& allowlist) {
  auto parsed = parse_url(url);
  if (!parsed || parsed->scheme != "https" || is_ip_literal(parsed->host)) {
    return false;
  }
  return allowlist.allows_host(parsed->host);
}

bool feature_invalid_homepage(const PackageMetadata& md, const DomainAllowlist& allowlist) {
  if (md.homepage && homepage_is_valid(*md.homepage, allowlist)) {
    return false;
  }
  return std::none_of(md.project_urls.begin(), md.project_urls.end(),
                      [&](const std::string& u) { return homepage_is_valid(u, allowlist); });
}

bool feature_invalid_author_email(const PackageMetadata& md) {
  for (const auto* field : {&md.author_email, &md.maintainer_email}) {
    if (!*field) {
      continue;
    }
    for (const auto& addr : extract_email_addresses(**field)) {
      if (email_is_valid(addr)) {
        return false;
      }
    }
  }
  return true;
}

} // namespace sentinel

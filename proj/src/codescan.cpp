#include "sentinel/codescan.hpp"

#include "sentinel/error.hpp"
#include "sentinel/resources.hpp"
#include "sentinel/text.hpp"
#include "sentinel/textfeat.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace sentinel {

// ---------------------------------------------------------------------------
// lexer

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view word) {
  if (word.empty() || word.size() > 2) {
    return false;
  }
  auto w = ascii_lower(word);
  return w == "r" || w == "u" || w == "b" || w == "f" || w == "br" || w == "rb" || w == "fr" || w == "rf";
}

std::size_t utf8_seq_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') {
        ++i;
      }
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

class Lexer {
public:
  explicit Lexer(std::string_view source) : src_(normalize_newlines(source)) {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= src_.size(); ++i) {
      if (i == src_.size() || src_[i] == '\n') {
        if (i == src_.size() && start == i && !out_.lines.empty()) {
          break; // trailing newline
        }
        out_.lines.emplace_back(src_.substr(start, i - start));
        start = i + 1;
      }
    }
    if (src_.empty()) {
      out_.lines.clear();
    }
    out_.code_lines.resize(out_.lines.size());
  }

  LexedSource run() {
    const std::size_t n = src_.size();
    while (pos_ < n) {
      auto c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < n && src_[pos_] != '\n') {
          ++pos_;
        }
      } else if (is_ident_start(c)) {
        lex_word();
      } else if (std::isdigit(c) || (c == '.' && pos_ + 1 < n && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        std::size_t start = pos_;
        while (pos_ < n && (is_ident_char(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          ++pos_;
        }
        emit(std::string_view(src_).substr(start, pos_ - start));
      } else if (c == '\'' || c == '"') {
        lex_string({}, pos_);
      } else {
        emit(std::string_view(&src_[pos_], 1));
        ++pos_;
      }
    }
    return std::move(out_);
  }

private:
  void emit(std::string_view text) {
    if (line_ - 1 < out_.code_lines.size()) {
      out_.code_lines[line_ - 1].append(text);
    }
  }

  void lex_word() {
    const std::size_t n = src_.size();
    std::size_t start = pos_;
    while (pos_ < n && is_ident_char(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    std::string_view word = std::string_view(src_).substr(start, pos_ - start);
    if (pos_ < n && (src_[pos_] == '\'' || src_[pos_] == '"') && is_string_prefix(word)) {
      lex_string(word, pos_);
      return;
    }
    std::size_t k = pos_;
    while (k < n) {
      if (src_[k] == ' ' || src_[k] == '\t' || src_[k] == '\f') {
        ++k;
      } else if (src_[k] == '\\' && k + 1 < n && src_[k + 1] == '\n') {
        k += 2;
      } else {
        break;
      }
    }
    IdentifierToken tok;
    tok.text = std::string(word);
    tok.line = line_;
    tok.column = column_of(start);
    tok.followed_by_paren = k < n && src_[k] == '(';
    out_.identifiers.push_back(std::move(tok));
    emit(word);
  }

  std::size_t column_of(std::size_t offset) const {
    auto nl = std::string_view(src_).substr(0, offset).rfind('\n');
    return nl == std::string_view::npos ? offset : offset - nl - 1;
  }

  void lex_string(std::string_view prefix, std::size_t quote_pos) {
    const std::size_t n = src_.size();
    const char q = src_[quote_pos];
    const bool triple = quote_pos + 2 < n && src_[quote_pos + 1] == q && src_[quote_pos + 2] == q;
    const std::size_t delim = triple ? 3 : 1;
    StringLiteral lit;
    lit.start_line = line_;
    lit.fstring = ascii_lower(prefix).find('f') != std::string::npos;
    emit(prefix);
    emit(std::string_view(src_).substr(quote_pos, delim));
    std::size_t j = quote_pos + delim;
    std::size_t body_start = j;
    lit.terminated = false;
    while (j < n) {
      char ch = src_[j];
      if (ch == '\\' && j + 1 < n) {
        lit.length += 1;
        ++j;
        if (src_[j] == '\n') {
          ++line_;
        }
        j += utf8_seq_len(static_cast<unsigned char>(src_[j]));
        lit.length += 1;
        continue;
      }
      if (ch == q && (!triple || (j + 2 < n && src_[j + 1] == q && src_[j + 2] == q))) {
        lit.terminated = true;
        break;
      }
      if (ch == '\n') {
        if (!triple) {
          break;
        }
        ++line_;
      }
      lit.length += 1;
      j += utf8_seq_len(static_cast<unsigned char>(ch));
    }
    std::string_view body = std::string_view(src_).substr(body_start, std::min(j, n) - body_start);
    if (lit.terminated) {
      emit(std::string_view(src_).substr(j, delim));
      j += delim;
    } else {
      out_.diagnostics.push_back({lit.start_line, triple ? "unterminated triple-quoted string consumed to end of file"
                                                         : "unterminated string literal"});
    }
    if (lit.fstring && body.find('{') != std::string_view::npos && body.find('(') != std::string_view::npos) {
      out_.diagnostics.push_back({lit.start_line, "f-string expression not scanned for API calls"});
    }
    lit.end_line = line_;
    pos_ = std::min(j, n);
    out_.literals.push_back(lit);
  }

  std::string src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  LexedSource out_;
};

} // namespace

LexedSource lex_lines(std::string_view source) { return Lexer(source).run(); }

// ---------------------------------------------------------------------------
// scanning

ScanConfig ScanConfig::defaults() {
  static const std::vector<std::string> apis = parse_word_list(resources::suspicious_apis());
  ScanConfig cfg;
  cfg.api_list.insert(apis.begin(), apis.end());
  return cfg;
}

void ScanConfig::validate() const {
  if (api_list.empty()) {
    throw Error(ErrorCode::ConfigError, "suspicious API list is empty");
  }
  if (long_string_threshold == 0) {
    throw Error(ErrorCode::ConfigError, "long string threshold must be positive");
  }
}

std::string ScanDiagnostic::format() const { return filepath + ":" + std::to_string(line) + ": " + message; }

bool is_scanned_file(const FileEntry& entry, const ScanConfig& cfg) {
  for (const auto& ext : cfg.scan_extensions) {
    if (entry.path.size() > ext.size() && entry.path.compare(entry.path.size() - ext.size(), ext.size(), ext) == 0) {
      return true;
    }
  }
  return false;
}

std::vector<UrlOccurrence> find_urls_in_line(std::string_view line) {
  std::vector<UrlOccurrence> out;
  auto is_terminator = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'' || c == '`' || c == '<' ||
           c == '>' || c == ')' || c == ']' || c == '}' || c == ',' || c == ';' || c == '\\';
  };
  std::vector<std::pair<std::size_t, std::size_t>> covered;
  std::size_t search = 0;
  while ((search = line.find("://", search)) != std::string_view::npos) {
    std::size_t s = search;
    while (s > 0 && std::isalpha(static_cast<unsigned char>(line[s - 1]))) {
      --s;
    }
    auto scheme = ascii_lower(line.substr(s, search - s));
    std::size_t e = search + 3;
    if (scheme != "http" && scheme != "https" && scheme != "ftp") {
      search = e;
      continue;
    }
    while (e < line.size() && !is_terminator(line[e])) {
      ++e;
    }
    auto url = line.substr(s, e - s);
    while (!url.empty() && (url.back() == '.' || url.back() == ':')) {
      url.remove_suffix(1);
    }
    if (auto parsed = parse_url(url)) {
      UrlOccurrence occ;
      occ.url = std::string(url);
      occ.scheme = scheme;
      occ.host = parsed->host;
      occ.is_ip = is_ip_literal(parsed->host);
      out.push_back(std::move(occ));
      covered.emplace_back(s, e);
    }
    search = e;
  }

  // Bare dotted quads need a port or path right after them; version strings never qualify.
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(line[i])) ||
        (i > 0 && (std::isalnum(static_cast<unsigned char>(line[i - 1])) || line[i - 1] == '.' || line[i - 1] == '_'))) {
      continue;
    }
    std::size_t e = i;
    while (e < line.size() && (std::isdigit(static_cast<unsigned char>(line[e])) || line[e] == '.')) {
      ++e;
    }
    auto host = line.substr(i, e - i);
    bool inside_url = std::any_of(covered.begin(), covered.end(), [&](auto r) { return i >= r.first && i < r.second; });
    if (inside_url || !is_dotted_quad(host) || e >= line.size()) {
      i = e;
      continue;
    }
    bool context = false;
    std::size_t end = e;
    if (line[e] == ':' && e + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[e + 1]))) {
      context = true;
      end = e + 1;
      while (end < line.size() && std::isdigit(static_cast<unsigned char>(line[end]))) {
        ++end;
      }
    }
    if (end < line.size() && line[end] == '/') {
      context = true;
    }
    if (context) {
      while (end < line.size() && !is_terminator(line[end])) {
        ++end;
      }
      UrlOccurrence occ;
      occ.url = std::string(line.substr(i, end - i));
      occ.scheme = "http";
      occ.host = std::string(host);
      occ.is_ip = true;
      out.push_back(std::move(occ));
    }
    i = std::max(end, e);
  }
  return out;
}

ScanResult scan_package(const PackageSnapshot& snapshot, const ScanConfig& cfg) {
  ScanResult result;
  std::set<SuspiciousLine> suspicious;
  for (const auto& entry : snapshot.files) {
    if (!is_scanned_file(entry, cfg)) {
      continue;
    }
    auto lexed = lex_lines(decode_utf8_lossy(entry.content));
    for (const auto& tok : lexed.identifiers) {
      if (tok.followed_by_paren && cfg.api_list.contains(tok.text)) {
        suspicious.insert({entry.path, tok.line, tok.text, lexed.lines[tok.line - 1]});
      }
    }
    for (const auto& lit : lexed.literals) {
      result.max_literal_length = std::max(result.max_literal_length, lit.length);
      if (lit.length > cfg.long_string_threshold) {
        result.long_strings.push_back({entry.path, lit.start_line, lit.length});
      }
    }
    for (std::size_t i = 0; i < lexed.lines.size(); ++i) {
      for (auto& occ : find_urls_in_line(lexed.lines[i])) {
        occ.filepath = entry.path;
        occ.lineno = i + 1;
        result.urls.push_back(std::move(occ));
      }
    }
    for (auto& d : lexed.diagnostics) {
      result.diagnostics.push_back({entry.path, d.line, std::move(d.message)});
    }
  }
  result.suspicious.assign(suspicious.begin(), suspicious.end());
  std::sort(result.urls.begin(), result.urls.end(), [](const UrlOccurrence& a, const UrlOccurrence& b) {
    return std::tie(a.filepath, a.lineno, a.url) < std::tie(b.filepath, b.lineno, b.url);
  });
  return result;
}

std::vector<SuspiciousLine> scan_suspicious_apis(const PackageSnapshot& snapshot, const ScanConfig& cfg) {
  return scan_package(snapshot, cfg).suspicious;
}

bool feature_long_string(const PackageSnapshot& snapshot, const ScanConfig& cfg) {
  return !scan_package(snapshot, cfg).long_strings.empty();
}

std::vector<UrlOccurrence> extract_urls(const PackageSnapshot& snapshot, const ScanConfig& cfg) {
  return scan_package(snapshot, cfg).urls;
}

bool url_is_suspicious(const UrlOccurrence& url, const DomainAllowlist& allowlist) {
  return url.scheme != "https" || url.is_ip || !allowlist.allows_host(url.host);
}

bool feature_suspicious_url(const PackageSnapshot& snapshot, const DomainAllowlist& allowlist, const ScanConfig& cfg) {
  auto urls = extract_urls(snapshot, cfg);
  return std::any_of(urls.begin(), urls.end(), [&](const UrlOccurrence& u) { return url_is_suspicious(u, allowlist); });
}

// ---------------------------------------------------------------------------
// install commands

namespace {

struct InstallPattern {
  std::string_view name;
  std::regex re;
};

const std::vector<InstallPattern>& install_patterns() {
  static const std::vector<InstallPattern> patterns = [] {
    std::vector<InstallPattern> p;
    p.push_back({"cmdclass-install",
                 std::regex(R"(cmdclass\s*=\s*(\{[^}]*['"]install['"]\s*:|dict\s*\([^)]*\binstall\s*=))")});
    p.push_back({"cmdclass-install", std::regex(R"(cmdclass\s*\[\s*['"]install['"]\s*\]\s*=)")});
    p.push_back({"install-command-class", std::regex(R"((setuptools|distutils)\.command\.install\b)")});
    p.push_back({"install-command-class",
                 std::regex(R"(class\s+\w+\s*\(\s*([A-Za-z_][\w.]*\.)?_?install\s*\))")});
    p.push_back({"pip-install-string", std::regex(R"(['"][^'"\n]*\bpip3?\s+install\b)")});
    p.push_back({"shell-install",
                 std::regex(R"(\b(os\.system|os\.popen|subprocess\.\w+|Popen|check_call|check_output)\s*\([^)\n]*install)")});
    return p;
  }();
  return patterns;
}

} // namespace

std::vector<InstallCommandMatch> find_install_commands(const TextFeature& text) {
  std::string joined;
  std::vector<std::size_t> line_starts;
  for (const auto& line : text.lines) {
    line_starts.push_back(joined.size());
    joined += line.text;
    joined += '\n';
  }
  std::set<std::size_t> seen;
  std::vector<InstallCommandMatch> out;
  for (const auto& pattern : install_patterns()) {
    for (auto it = std::sregex_iterator(joined.begin(), joined.end(), pattern.re); it != std::sregex_iterator(); ++it) {
      auto offset = static_cast<std::size_t>(it->position(0));
      auto idx = static_cast<std::size_t>(std::upper_bound(line_starts.begin(), line_starts.end(), offset) -
                                          line_starts.begin()) - 1;
      if (!seen.insert(idx).second) {
        continue;
      }
      const auto& line = text.lines[idx];
      out.push_back({line.filepath, line.lineno, line.text, std::string(pattern.name)});
    }
  }
  std::sort(out.begin(), out.end(), [](const InstallCommandMatch& a, const InstallCommandMatch& b) {
    return std::tie(a.filepath, a.lineno) < std::tie(b.filepath, b.lineno);
  });
  return out;
}

bool feature_install_command(const TextFeature& text) { return !find_install_commands(text).empty(); }

} // namespace sentinel

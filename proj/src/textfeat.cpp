#include "sentinel/textfeat.hpp"

#include "sentinel/error.hpp"
#include "sentinel/resources.hpp"
#include "sentinel/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

namespace sentinel {

std::string_view to_string(TextSource source) {
  switch (source) {
  case TextSource::SetupPy: return "setup-py";
  case TextSource::SuspiciousLine: return "suspicious-line";
  case TextSource::UrlFile: return "url-file";
  }
  return "unknown";
}

TextFeature build_text_feature(const PackageSnapshot& snapshot, const ScanResult& scan,
                               const DomainAllowlist& allowlist) {
  TextFeature feature;
  std::set<std::pair<std::string, std::size_t>> seen;
  auto add = [&](TextSource src, const std::string& path, std::size_t lineno, std::string_view text) {
    if (seen.emplace(path, lineno).second) {
      feature.lines.push_back({src, path, lineno, std::string(text)});
    }
  };
  auto add_file = [&](TextSource src, const FileEntry& entry) {
    auto text = decode_utf8_lossy(entry.content);
    std::size_t lineno = 0;
    for (auto line : split_lines(text)) {
      add(src, entry.path, ++lineno, line);
    }
  };

  if (const auto* setup = snapshot.first_of_kind(FileKind::SetupPy)) {
    add_file(TextSource::SetupPy, *setup);
  }
  for (const auto& s : scan.suspicious) {
    add(TextSource::SuspiciousLine, s.filepath, s.lineno, s.line_text);
  }
  std::set<std::string> url_files;
  for (const auto& u : scan.urls) {
    if (url_is_suspicious(u, allowlist)) {
      url_files.insert(u.filepath);
    }
  }
  for (const auto& path : url_files) {
    const auto* entry = snapshot.find(path);
    if (entry && entry->kind == FileKind::PythonSource) {
      add_file(TextSource::UrlFile, *entry);
    }
  }
  return feature;
}

std::string_view to_string(VectorMode mode) {
  switch (mode) {
  case VectorMode::Binary: return "binary";
  case VectorMode::Count: return "count";
  case VectorMode::Freq: return "freq";
  case VectorMode::Tfidf: return "tfidf";
  }
  return "unknown";
}

VectorMode vector_mode_from_string(std::string_view name) {
  auto n = ascii_lower(trim(name));
  if (n == "binary") return VectorMode::Binary;
  if (n == "count") return VectorMode::Count;
  if (n == "freq") return VectorMode::Freq;
  if (n == "tfidf") return VectorMode::Tfidf;
  throw Error(ErrorCode::ConfigError, "unknown tokenizer mode '" + std::string(name) + "'");
}

void TokenizerConfig::validate() const {
  if (num_words == 0) {
    throw Error(ErrorCode::ConfigError, "num_words must be at least 1");
  }
}

namespace {

const std::unordered_set<std::string>& keyword_set() {
  static const auto set = [] {
    auto words = parse_word_list(resources::python_keywords());
    return std::unordered_set<std::string>(words.begin(), words.end());
  }();
  return set;
}

const std::unordered_set<std::string>& stopword_set() {
  static const auto set = [] {
    std::unordered_set<std::string> s;
    for (auto& w : parse_word_list(resources::stopwords())) {
      s.insert(ascii_lower(w));
    }
    return s;
  }();
  return set;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

void tokenize_into(std::string_view text, const TokenizerConfig& cfg, std::vector<std::string>& out) {
  const auto& keywords = keyword_set();
  const auto& stops = stopword_set();
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    bool numeric = true;
    while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i]))) {
      numeric = numeric && std::isdigit(static_cast<unsigned char>(text[i]));
      ++i;
    }
    if (numeric) {
      continue;
    }
    std::string_view raw = text.substr(start, i - start);
    // Keywords are case-sensitive in Python, so `None` is dropped but `none` is not.
    if (cfg.remove_keywords && keywords.contains(std::string(raw))) {
      continue;
    }
    std::string lower = ascii_lower(raw);
    if (cfg.remove_stopwords && stops.contains(lower)) {
      continue;
    }
    std::string tok = cfg.lowercase ? std::move(lower) : std::string(raw);
    if (cfg.stemming) {
      tok = stem(tok);
    }
    out.push_back(std::move(tok));
  }
}

} // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  tokenize_into(text, cfg, out);
  return out;
}

std::vector<std::string> tokenize(const TextFeature& text, const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& line : text.lines) {
    tokenize_into(line.text, cfg, out);
  }
  return out;
}

std::string stem(std::string_view token) {
  static constexpr std::string_view suffixes[] = {"ingly", "edly", "ness", "ment", "ing", "ies", "ed", "ly", "es", "s"};
  for (auto suffix : suffixes) {
    if (token.size() >= suffix.size() + 3 && token.substr(token.size() - suffix.size()) == suffix) {
      std::string out(token.substr(0, token.size() - suffix.size()));
      if (suffix == "ies") {
        out += 'y';
      }
      return out;
    }
  }
  return std::string(token);
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint32_t> doc_freq, std::size_t corpus_size)
    : tokens_(std::move(tokens)), doc_freq_(std::move(doc_freq)), corpus_size_(corpus_size) {
  if (tokens_.size() != doc_freq_.size()) {
    throw Error(ErrorCode::InvalidArgument, "vocabulary token and document-frequency lists differ in length");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

long Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& corpus, const TokenizerConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "cannot fit a vocabulary on an empty corpus");
  }
  std::unordered_map<std::string, std::pair<std::uint64_t, std::uint32_t>> stats; // count, doc freq
  for (const auto& doc : corpus) {
    std::unordered_set<std::string_view> in_doc;
    for (const auto& tok : doc) {
      auto& s = stats[tok];
      s.first += 1;
      if (in_doc.insert(tok).second) {
        s.second += 1;
      }
    }
  }
  std::vector<std::pair<std::string, std::pair<std::uint64_t, std::uint32_t>>> ranked(stats.begin(), stats.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) {
      return a.second.first > b.second.first;
    }
    return a.first < b.first;
  });
  if (ranked.size() > cfg.num_words) {
    ranked.resize(cfg.num_words);
  }
  std::vector<std::string> tokens;
  std::vector<std::uint32_t> df;
  for (auto& [tok, s] : ranked) {
    tokens.push_back(tok);
    df.push_back(s.second);
  }
  return Vocabulary(std::move(tokens), std::move(df), corpus.size());
}

std::vector<double> vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab, VectorMode mode) {
  std::vector<double> out(vocab.size(), 0.0);
  std::map<long, double> counts;
  for (const auto& tok : tokens) {
    auto idx = vocab.index_of(tok);
    if (idx >= 0) {
      counts[idx] += 1.0;
    }
  }
  for (auto [idx, c] : counts) {
    double v = 0.0;
    switch (mode) {
    case VectorMode::Binary: v = 1.0; break;
    case VectorMode::Count: v = c; break;
    case VectorMode::Freq: v = c / static_cast<double>(tokens.size()); break;
    case VectorMode::Tfidf: {
      double df = vocab.doc_freq()[static_cast<std::size_t>(idx)];
      v = (1.0 + std::log(c)) * std::log(1.0 + static_cast<double>(vocab.corpus_size()) / (1.0 + df));
      break;
    }
    }
    out[static_cast<std::size_t>(idx)] = v;
  }
  return out;
}

} // namespace sentinel

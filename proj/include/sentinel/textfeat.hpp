#pragma once

#include "sentinel/archive.hpp"
#include "sentinel/codescan.hpp"
#include "sentinel/metadata.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sentinel {

enum class TextSource { SetupPy, SuspiciousLine, UrlFile };

std::string_view to_string(TextSource source);

struct TextLine {
  TextSource source = TextSource::SetupPy;
  std::string filepath;
  std::size_t lineno = 0;
  std::string text;

  bool operator==(const TextLine&) const = default;
};

/// setup.py block, then suspicious lines sorted, then url-file blocks sorted by path.
/// A (filepath, lineno) pair appears at most once.
struct TextFeature {
  std::vector<TextLine> lines;

  bool empty() const noexcept { return lines.empty(); }
};

TextFeature build_text_feature(const PackageSnapshot& snapshot, const ScanResult& scan,
                               const DomainAllowlist& allowlist);

enum class VectorMode { Binary, Count, Freq, Tfidf };

std::string_view to_string(VectorMode mode);
/// Throws Error(ConfigError) for unknown names.
VectorMode vector_mode_from_string(std::string_view name);

struct TokenizerConfig {
  bool lowercase = true;
  std::size_t num_words = 500;
  VectorMode mode = VectorMode::Binary;
  bool remove_keywords = true;
  bool remove_stopwords = true;
  bool stemming = false;

  /// Throws Error(ConfigError) when num_words is 0.
  void validate() const;
  bool operator==(const TokenizerConfig&) const = default;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg);
std::vector<std::string> tokenize(const TextFeature& text, const TokenizerConfig& cfg);

/// Suffix-stripping stemmer; stems shorter than three characters are left alone.
std::string stem(std::string_view token);

class Vocabulary {
public:
  Vocabulary() = default;
  /// Tokens in index order. Throws Error(InvalidArgument) on duplicates or size mismatch.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint32_t> doc_freq, std::size_t corpus_size);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint32_t>& doc_freq() const noexcept { return doc_freq_; }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  /// -1 when the token is not in the vocabulary.
  long index_of(std::string_view token) const;
  bool contains(std::string_view token) const { return index_of(token) >= 0; }

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && doc_freq_ == other.doc_freq_ && corpus_size_ == other.corpus_size_;
  }

private:
  std::vector<std::string> tokens_;
  std::vector<std::uint32_t> doc_freq_;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Ranks by total count descending, ties lexicographic. Throws Error(EmptyCorpus).
Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& corpus, const TokenizerConfig& cfg);

/// Dense vector of length vocab.size(); out-of-vocabulary tokens are ignored.
std::vector<double> vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab, VectorMode mode);

} // namespace sentinel

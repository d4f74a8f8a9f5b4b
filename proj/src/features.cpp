#include "sentinel/features.hpp"

#include "sentinel/error.hpp"
#include "sentinel/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace sentinel {

const std::array<std::string_view, kStructuredCount>& structured_feature_names() {
  static const std::array<std::string_view, kStructuredCount> names = {
      "invalid_homepage", "invalid_author_email", "install_command", "suspicious_url",
      "long_string",      "minimum_setup_config", "mismatch_license"};
  return names;
}

std::string_view to_string(Label label) { return label == Label::Malicious ? "malicious" : "benign"; }

Label label_from_string(std::string_view text) {
  auto t = ascii_lower(trim(text));
  if (t == "malicious" || t == "1") {
    return Label::Malicious;
  }
  if (t == "benign" || t == "0") {
    return Label::Benign;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown label '" + std::string(text) + "'");
}

std::vector<double> FeatureVector::flat() const {
  std::vector<double> out;
  out.reserve(kStructuredCount + text.size());
  for (bool b : structured) {
    out.push_back(b ? 1.0 : 0.0);
  }
  out.insert(out.end(), text.begin(), text.end());
  return out;
}

const DomainAllowlist& ExtractionConfig::domains() const {
  return allowlist ? *allowlist : DomainAllowlist::bundled();
}

void ExtractionConfig::validate() const {
  scan.validate();
  tokenizer.validate();
}

PackageMetadata package_metadata(const PackageSnapshot& snapshot) {
  if (const auto* info = snapshot.first_of_kind(FileKind::PkgInfo)) {
    return parse_pkg_info(info->content);
  }
  return {};
}

ExtractionResult extract_features(const PackageSnapshot& snapshot, const ExtractionConfig& cfg,
                                  const Vocabulary* vocab) {
  ExtractionResult res;
  const auto& allow = cfg.domains();
  res.metadata = package_metadata(snapshot);
  res.license = extract_license_positions(snapshot, res.metadata);
  res.setup_cfg = summarize_setup_cfg(snapshot);
  res.scan = scan_package(snapshot, cfg.scan);
  res.text = build_text_feature(snapshot, res.scan, allow);
  res.install_commands = find_install_commands(res.text);

  auto& s = res.vector.structured;
  s[static_cast<std::size_t>(StructuredFeature::InvalidHomepage)] = feature_invalid_homepage(res.metadata, allow);
  s[static_cast<std::size_t>(StructuredFeature::InvalidAuthorEmail)] = feature_invalid_author_email(res.metadata);
  s[static_cast<std::size_t>(StructuredFeature::InstallCommand)] = !res.install_commands.empty();
  s[static_cast<std::size_t>(StructuredFeature::SuspiciousUrl)] =
      std::any_of(res.scan.urls.begin(), res.scan.urls.end(),
                  [&](const UrlOccurrence& u) { return url_is_suspicious(u, allow); });
  s[static_cast<std::size_t>(StructuredFeature::LongString)] = !res.scan.long_strings.empty();
  s[static_cast<std::size_t>(StructuredFeature::MinimumSetupConfig)] =
      feature_minimum_setup_config(res.setup_cfg, cfg.min_setup_keys);
  s[static_cast<std::size_t>(StructuredFeature::MismatchLicense)] = feature_mismatch_license(res.license);

  res.tokens = tokenize(res.text, cfg.tokenizer);
  if (vocab) {
    res.vector.text = vectorize(res.tokens, *vocab, cfg.tokenizer.mode);
  }
  return res;
}

PearsonResult pearson_matrix(std::span<const StructuredVector> rows) {
  if (rows.size() < 2) {
    throw Error(ErrorCode::TooFewExamples, "Pearson correlation needs at least two examples");
  }
  const double n = static_cast<double>(rows.size());
  std::array<double, kStructuredCount> mean{};
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < kStructuredCount; ++j) {
      mean[j] += row[j] ? 1.0 : 0.0;
    }
  }
  for (auto& m : mean) {
    m /= n;
  }
  std::array<std::array<double, kStructuredCount>, kStructuredCount> cov{};
  for (const auto& row : rows) {
    for (std::size_t a = 0; a < kStructuredCount; ++a) {
      double da = (row[a] ? 1.0 : 0.0) - mean[a];
      for (std::size_t b = 0; b < kStructuredCount; ++b) {
        cov[a][b] += da * ((row[b] ? 1.0 : 0.0) - mean[b]);
      }
    }
  }
  PearsonResult out;
  for (std::size_t a = 0; a < kStructuredCount; ++a) {
    out.constant[a] = cov[a][a] == 0.0;
  }
  for (std::size_t a = 0; a < kStructuredCount; ++a) {
    for (std::size_t b = 0; b < kStructuredCount; ++b) {
      if (out.constant[a] || out.constant[b]) {
        out.r[a][b] = 0.0;
      } else if (a == b) {
        out.r[a][b] = 1.0;
      } else {
        out.r[a][b] = cov[a][b] / std::sqrt(cov[a][a] * cov[b][b]);
      }
    }
  }
  return out;
}

PearsonResult pearson_matrix(std::span<const LabeledExample> dataset) {
  std::vector<StructuredVector> rows;
  for (const auto& ex : dataset) {
    rows.push_back(ex.vector.structured);
  }
  return pearson_matrix(std::span<const StructuredVector>(rows));
}

PearsonResult pearson_matrix(std::span<const DatasetRecord> dataset) {
  std::vector<StructuredVector> rows;
  for (const auto& rec : dataset) {
    rows.push_back(rec.structured);
  }
  return pearson_matrix(std::span<const StructuredVector>(rows));
}

void write_dataset_jsonl(std::ostream& out, std::span<const DatasetRecord> records) {
  for (const auto& rec : records) {
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["label"] = to_string(rec.label);
    j["structured"] = rec.structured;
    j["tokens"] = rec.tokens;
    out << j.dump() << '\n';
  }
}

std::vector<DatasetRecord> read_dataset_jsonl(std::istream& in) {
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) {
      continue;
    }
    try {
      auto j = nlohmann::json::parse(line);
      DatasetRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.label = label_from_string(j.at("label").get<std::string>());
      auto structured = j.at("structured").get<std::vector<bool>>();
      if (structured.size() != kStructuredCount) {
        throw Error(ErrorCode::Corrupt, "expected 7 structured values");
      }
      std::copy(structured.begin(), structured.end(), rec.structured.begin());
      rec.tokens = j.at("tokens").get<std::vector<std::string>>();
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Corrupt, "dataset line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

} // namespace sentinel

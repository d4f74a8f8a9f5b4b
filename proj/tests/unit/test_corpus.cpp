#include "sentinel/corpus.hpp"
#include "sentinel/error.hpp"
#include "sentinel/text.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace sentinel;
using sentinel::test::TempDir;

namespace {

StructuredVector features_of(const TraitSpec& spec, const std::filesystem::path& dir) {
  auto path = synth_package(spec, dir);
  return extract_features(open_package(path), ExtractionConfig{}).vector.structured;
}

} // namespace

TEST(Corpus, TraitNames) {
  for (auto t : all_traits()) EXPECT_EQ(trait_from_string(to_string(t)), t);
  EXPECT_THROW(trait_from_string("nope"), Error);
  EXPECT_EQ(all_traits().size(), kTraitCount);
  auto v = expected_structured({Trait::InstallHook, Trait::LicenseClash});
  EXPECT_TRUE(v[2]);
  EXPECT_TRUE(v[6]);
  EXPECT_FALSE(v[0]);
}

TEST(Corpus, EachTraitSetsExactlyItsFeature) {
  TempDir tmp;
  std::uint64_t serial = 0;
  for (auto t : all_traits()) {
    for (auto label : {Label::Benign, Label::Malicious}) {
      for (int s = 0; s < 3; ++s) {
        TraitSpec spec;
        spec.label = label;
        spec.traits = {t};
        spec.seed = 100 + serial;
        spec.name = "t" + std::to_string(serial++);
        EXPECT_EQ(features_of(spec, tmp.path()), expected_structured(spec.traits)) << to_string(t);
      }
    }
  }
}

TEST(Corpus, PlainPackageIsClean) {
  TempDir tmp;
  TraitSpec spec;
  spec.seed = 4;
  EXPECT_EQ(features_of(spec, tmp.path()), StructuredVector{});
}

TEST(Corpus, SuspiciousApisAppearInScan) {
  TempDir tmp;
  TraitSpec spec;
  spec.label = Label::Malicious;
  spec.suspicious_apis = {"exec", "system"};
  spec.seed = 8;
  auto snap = open_package(synth_package(spec, tmp.path()));
  auto res = extract_features(snap, ExtractionConfig{});
  std::set<std::string> apis;
  for (const auto& l : res.scan.suspicious) apis.insert(l.api_name);
  EXPECT_TRUE(apis.contains("exec"));
  EXPECT_TRUE(apis.contains("system"));
  EXPECT_EQ(res.vector.structured, StructuredVector{});
}

TEST(Corpus, SpecsAndGeneration) {
  auto specs = corpus_specs(20, 10, 0.1, 5);
  ASSERT_EQ(specs.size(), 30u);
  std::size_t mal = 0;
  std::set<std::string> names;
  for (const auto& s : specs) {
    mal += s.label == Label::Malicious;
    names.insert(s.name);
    if (s.label == Label::Benign) EXPECT_LE(s.traits.size(), 1u);
  }
  EXPECT_EQ(mal, 10u);
  EXPECT_EQ(names.size(), 30u);
  EXPECT_THROW(corpus_specs(5, 5, 2.0, 1), Error);

  TempDir a, b;
  auto ma = generate_corpus(10, 5, 0.2, 9, a.path());
  auto mb = generate_corpus(10, 5, 0.2, 9, b.path());
  EXPECT_EQ(ma, mb);
  EXPECT_EQ(ma.entries.size(), 15u);
  EXPECT_EQ(read_file(a / "manifest.jsonl"), read_file(b / "manifest.jsonl"));
  for (const auto& e : ma.entries) {
    EXPECT_EQ(read_file(a.path() / e.path), read_file(b.path() / e.path));
  }
  EXPECT_EQ(read_manifest(a / "manifest.jsonl"), ma);
  auto loaded = load_labeled_corpus(a / "manifest.jsonl");
  EXPECT_EQ(loaded.size(), 15u);
  auto records = extract_dataset(a / "manifest.jsonl", ExtractionConfig{});
  EXPECT_EQ(records.size(), 15u);
  EXPECT_EQ(records[0].id, ma.entries[0].path);
}

TEST(Corpus, ManifestErrors) {
  TempDir tmp;
  write_file(tmp / "m.jsonl", "{\"path\": \"x.tar.gz\", \"label\": \"benign\"}\nnot json\n");
  try {
    read_manifest(tmp / "m.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Corrupt);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  write_file(tmp / "m2.jsonl", "{\"path\": \"missing.tar.gz\", \"label\": \"benign\"}\n");
  try {
    load_labeled_corpus(tmp / "m2.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
    EXPECT_NE(std::string(e.what()).find("missing.tar.gz"), std::string::npos);
  }
}

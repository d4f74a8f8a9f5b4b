#include "sentinel/error.hpp"
#include "sentinel/filefeat.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace sentinel;
using sentinel::test::file;
using sentinel::test::TempDir;

TEST(License, CanonicalizesByEarliestKeyword) {
  EXPECT_EQ(canonicalize_license("MIT"), CanonicalLicense::MIT);
  EXPECT_EQ(canonicalize_license("License :: OSI Approved :: Apache Software License"), CanonicalLicense::Apache2);
  EXPECT_EQ(canonicalize_license("BSD-3-Clause"), CanonicalLicense::BSD);
  EXPECT_EQ(canonicalize_license("GNU Lesser General Public License v3"), CanonicalLicense::LGPL);
  EXPECT_EQ(canonicalize_license("something bespoke"), CanonicalLicense::Other);
  EXPECT_EQ(canonicalize_license("submit"), CanonicalLicense::Other);
}

TEST(License, TableParsing) {
  auto table = LicenseTable::from_text("MIT: foo | bar\nGPL: baz\n");
  EXPECT_EQ(table.canonicalize("xx baz foo"), CanonicalLicense::GPL);
  EXPECT_THROW(LicenseTable::from_text("Nonsense: x\n"), Error);
  EXPECT_EQ(canonical_license_from_string("MIT"), CanonicalLicense::MIT);
  EXPECT_FALSE(canonical_license_from_string("nope").has_value());
}

TEST(License, MismatchFeature) {
  LicenseEvidence ev;
  EXPECT_TRUE(feature_mismatch_license(ev));
  ev.from_field = CanonicalLicense::MIT;
  EXPECT_FALSE(feature_mismatch_license(ev));
  ev.from_classifier = CanonicalLicense::MIT;
  ev.from_file = CanonicalLicense::MIT;
  EXPECT_FALSE(feature_mismatch_license(ev));
  ev.from_classifier = CanonicalLicense::Apache2;
  EXPECT_TRUE(feature_mismatch_license(ev));
}

TEST(License, ExtractsThreePositions) {
  TempDir tmp;
  auto snap = test::snapshot_of({file("p/PKG-INFO", test::clean_pkg_info()), file("p/LICENSE", test::mit_license())},
                                tmp.path());
  auto md = parse_pkg_info(snap.find("PKG-INFO")->content);
  auto ev = extract_license_positions(snap, md);
  EXPECT_EQ(ev.from_field, CanonicalLicense::MIT);
  EXPECT_EQ(ev.from_classifier, CanonicalLicense::MIT);
  EXPECT_EQ(ev.from_file, CanonicalLicense::MIT);
  md.license_field = "UNKNOWN";
  EXPECT_FALSE(extract_license_positions(snap, md).from_field.has_value());
}

TEST(SetupCfg, CountsMeaningfulKeys) {
  auto s = summarize_setup_cfg(test::rich_setup_cfg());
  EXPECT_TRUE(s.present);
  EXPECT_TRUE(s.parsed);
  EXPECT_EQ(s.meaningful_keys, 5u);
  EXPECT_FALSE(feature_minimum_setup_config(s));
  auto egg = summarize_setup_cfg("[egg_info]\ntag_build =\ntag_date = 0\n");
  EXPECT_EQ(egg.meaningful_keys, 0u);
  EXPECT_TRUE(feature_minimum_setup_config(egg));
  auto two = summarize_setup_cfg("[metadata]\nname = x\nversion = 1\n");
  EXPECT_TRUE(feature_minimum_setup_config(two, 3));
  EXPECT_FALSE(feature_minimum_setup_config(two, 2));
}

TEST(SetupCfg, AbsentOrBrokenCountsAsMinimal) {
  TempDir tmp;
  auto snap = test::snapshot_of({file("p/setup.py", "setup()\n")}, tmp.path());
  EXPECT_FALSE(summarize_setup_cfg(snap).present);
  EXPECT_TRUE(feature_minimum_setup_config(snap));
  auto broken = summarize_setup_cfg("this is not ini\n");
  EXPECT_TRUE(broken.present);
  EXPECT_FALSE(broken.parsed);
  EXPECT_TRUE(feature_minimum_setup_config(broken));
}

#include "sentinel/archive.hpp"
#include "sentinel/error.hpp"
#include "sentinel/text.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace sentinel;
using sentinel::test::file;
using sentinel::test::TempDir;

namespace {

ErrorCode open_error(const std::filesystem::path& path, const SizeLimits& limits = {}) {
  try {
    open_package(path, limits);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error for " << path;
  return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Archive, ClassifiesFiles) {
  EXPECT_EQ(classify_file("pkg/setup.py"), FileKind::SetupPy);
  EXPECT_EQ(classify_file("setup.cfg"), FileKind::SetupCfg);
  EXPECT_EQ(classify_file("PKG-INFO"), FileKind::PkgInfo);
  EXPECT_EQ(classify_file("x.dist-info/METADATA"), FileKind::PkgInfo);
  EXPECT_EQ(classify_file("LICENSE.txt"), FileKind::LicenseFile);
  EXPECT_EQ(classify_file("COPYING"), FileKind::LicenseFile);
  EXPECT_EQ(classify_file("pkg/mod.py"), FileKind::PythonSource);
  EXPECT_EQ(classify_file("README.md"), FileKind::Other);
}

TEST(Archive, NormalizesMemberPaths) {
  EXPECT_EQ(normalize_member_path("a/./b//c.py"), "a/b/c.py");
  EXPECT_EQ(normalize_member_path("a\\b.py"), "a/b.py");
  EXPECT_FALSE(normalize_member_path("./").has_value());
  EXPECT_FALSE(normalize_member_path("").has_value());
  EXPECT_THROW(normalize_member_path("a/../b"), Error);
  EXPECT_THROW(normalize_member_path("/etc/passwd"), Error);
  EXPECT_THROW(normalize_member_path("C:/x"), Error);
}

TEST(Archive, TarGzRoundTripStripsTopLevel) {
  TempDir tmp;
  auto snap = test::snapshot_of({file("demo-1.0/PKG-INFO", test::clean_pkg_info()),
                                 file("demo-1.0/setup.py", "setup()\n"), file("demo-1.0/demo/__init__.py", "")},
                                tmp.path(), "demo-1.0");
  EXPECT_EQ(snap.root, "demo-1.0");
  EXPECT_EQ(snap.name, "demo");
  EXPECT_EQ(snap.version, "1.0");
  ASSERT_EQ(snap.files.size(), 3u);
  EXPECT_EQ(snap.files[0].path, "PKG-INFO");
  ASSERT_NE(snap.find("setup.py"), nullptr);
  EXPECT_EQ(snap.find("setup.py")->content, "setup()\n");
  EXPECT_EQ(snap.first_of_kind(FileKind::PythonSource)->path, "demo/__init__.py");
}

TEST(Archive, ZipAndWheelOpen) {
  TempDir tmp;
  std::vector<ArchiveMember> m{file("demo/__init__.py", "x = 1\n"),
                               file("demo-1.0.dist-info/METADATA", test::clean_pkg_info())};
  write_file(tmp / "demo-1.0-py3-none-any.whl", build_zip(m));
  auto snap = open_package(tmp / "demo-1.0-py3-none-any.whl");
  EXPECT_EQ(snap.name, "demo");
  EXPECT_NE(snap.find("demo/__init__.py"), nullptr);
  write_file(tmp / "stored.zip", build_zip(m, true));
  EXPECT_EQ(open_package(tmp / "stored.zip").files.size(), 2u);
}

TEST(Archive, DirectoryOpen) {
  TempDir tmp;
  std::filesystem::create_directories(tmp / "d/pkg");
  write_file(tmp / "d/setup.py", "setup()\n");
  write_file(tmp / "d/pkg/a.py", "a = 1\n");
  auto snap = open_package(tmp / "d");
  ASSERT_EQ(snap.files.size(), 2u);
  EXPECT_EQ(snap.files[0].path, "pkg/a.py");
  EXPECT_EQ(snap.files[1].path, "setup.py");
}

TEST(Archive, RejectsTraversalAndAbsolutePaths) {
  TempDir tmp;
  write_file(tmp / "a.tar.gz", gzip_compress(build_tar(std::vector{file("p/../../x.py", "x")})));
  EXPECT_EQ(open_error(tmp / "a.tar.gz"), ErrorCode::PathTraversal);
  write_file(tmp / "b.tar.gz", gzip_compress(build_tar(std::vector{file("/abs/x.py", "x")})));
  EXPECT_EQ(open_error(tmp / "b.tar.gz"), ErrorCode::PathTraversal);
  write_file(tmp / "c.zip", build_zip(std::vector{file("../x.py", "x")}));
  EXPECT_EQ(open_error(tmp / "c.zip"), ErrorCode::PathTraversal);
  EXPECT_FALSE(std::filesystem::exists(tmp.path().parent_path() / "x.py"));
}

TEST(Archive, EnforcesSizeLimits) {
  TempDir tmp;
  SizeLimits small;
  small.per_file = 1000;
  small.total = 1500;
  small.max_entries = 3;
  write_file(tmp / "big.tar.gz", gzip_compress(build_tar(std::vector{file("p/a.py", std::string(5000, 'a'))})));
  EXPECT_EQ(open_error(tmp / "big.tar.gz", small), ErrorCode::LimitExceeded);
  write_file(tmp / "big.zip", build_zip(std::vector{file("p/a.py", std::string(5000, 'a'))}));
  EXPECT_EQ(open_error(tmp / "big.zip", small), ErrorCode::LimitExceeded);
  write_file(tmp / "total.zip", build_zip(std::vector{file("p/a.py", std::string(900, 'a')),
                                                      file("p/b.py", std::string(900, 'b'))}));
  EXPECT_EQ(open_error(tmp / "total.zip", small), ErrorCode::LimitExceeded);
  std::vector<ArchiveMember> many;
  for (int i = 0; i < 5; ++i) many.push_back(file("p/" + std::to_string(i) + ".py", ""));
  write_file(tmp / "many.tar.gz", gzip_compress(build_tar(many)));
  EXPECT_EQ(open_error(tmp / "many.tar.gz", small), ErrorCode::LimitExceeded);
}

TEST(Archive, SkipsLinksWithWarning) {
  TempDir tmp;
  std::vector<ArchiveMember> m{file("p/a.py", "a"), {"p/link.py", "", ArchiveMember::Type::Symlink, "/etc/passwd"}};
  auto snap = test::snapshot_of(m, tmp.path());
  EXPECT_EQ(snap.files.size(), 1u);
  EXPECT_FALSE(snap.warnings.empty());
}

TEST(Archive, ReportsBadInputs) {
  TempDir tmp;
  EXPECT_EQ(open_error(tmp / "missing.tar.gz"), ErrorCode::IoError);
  write_file(tmp / "x.rar", "whatever");
  EXPECT_EQ(open_error(tmp / "x.rar"), ErrorCode::UnsupportedFormat);
  write_file(tmp / "bad.tar.gz", "not gzip at all");
  EXPECT_EQ(open_error(tmp / "bad.tar.gz"), ErrorCode::CorruptArchive);
  write_file(tmp / "bad.zip", "PK garbage");
  EXPECT_EQ(open_error(tmp / "bad.zip"), ErrorCode::CorruptArchive);
}

TEST(Archive, WritersAreDeterministic) {
  std::vector<ArchiveMember> m{file("p/a.py", "a = 1\n"), file("p/b.py", "b = 2\n")};
  EXPECT_EQ(gzip_compress(build_tar(m)), gzip_compress(build_tar(m)));
  EXPECT_EQ(build_zip(m), build_zip(m));
  auto data = build_tar(m);
  EXPECT_EQ(gzip_decompress(gzip_compress(data), 1u << 20), data);
}

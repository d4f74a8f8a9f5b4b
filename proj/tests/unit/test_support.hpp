#pragma once

#include "sentinel/archive.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sentinel::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

ArchiveMember file(std::string name, std::string content);

/// Writes members as a .tar.gz under `dir` and opens it.
PackageSnapshot snapshot_of(const std::vector<ArchiveMember>& members, const std::filesystem::path& dir,
                            const std::string& stem = "pkg-1.0");

/// PKG-INFO with an allowlisted homepage, valid email and consistent MIT license.
std::string clean_pkg_info(const std::string& name = "demo");
std::string rich_setup_cfg();
std::string mit_license();

} // namespace sentinel::test

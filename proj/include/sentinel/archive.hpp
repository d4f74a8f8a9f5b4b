#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

enum class FileKind { PythonSource, PkgInfo, SetupPy, SetupCfg, LicenseFile, Other };

std::string_view to_string(FileKind kind);

/// One regular file of a package, addressed by a normalized relative path.
struct FileEntry {
  std::string path;
  FileKind kind = FileKind::Other;
  std::string content; ///< raw bytes
  std::uint64_t size = 0;

  bool operator==(const FileEntry&) const = default;
};

struct SizeLimits {
  std::uint64_t per_file = 20ULL * 1024 * 1024;
  std::uint64_t total = 200ULL * 1024 * 1024;
  std::size_t max_entries = 20000;
};

/// Immutable, normalized view of one package artifact. Files are unique and
/// sorted by path; no path is absolute or contains a `..` segment.
struct PackageSnapshot {
  std::string name;
  std::string version;
  std::string root; ///< stripped top-level directory, empty when none
  std::vector<FileEntry> files;
  std::vector<std::string> warnings; ///< skipped links, devices, duplicates

  /// Exact path lookup.
  const FileEntry* find(std::string_view path) const;
  /// Shallowest entry of the given kind (ties broken by path order).
  const FileEntry* first_of_kind(FileKind kind) const;

  bool operator==(const PackageSnapshot&) const = default;
};

FileKind classify_file(std::string_view path);

/// Opens a `.tar.gz`/`.tgz`, `.zip`, `.whl` or a directory. Throws Error with
/// UnsupportedFormat, PathTraversal, LimitExceeded, CorruptArchive or IoError.
PackageSnapshot open_package(const std::filesystem::path& path, const SizeLimits& limits = {});

/// Normalizes an archive member name. Returns nullopt for names that denote the
/// root itself; throws PathTraversal for absolute names or `..` segments.
std::optional<std::string> normalize_member_path(std::string_view name);

// --- writers (used by the corpus generator and tests) -----------------------

struct ArchiveMember {
  enum class Type { File, Directory, Symlink, CharDevice };
  std::string name; ///< written verbatim, no normalization
  std::string content;
  Type type = Type::File;
  std::string link_target;
};

/// Deterministic ustar stream (mtime 0, uid/gid 0, mode 0644/0755).
std::string build_tar(std::span<const ArchiveMember> members);
/// Deterministic gzip wrapper (mtime 0).
std::string gzip_compress(std::string_view data, int level = 9);
std::string gzip_decompress(std::string_view data, std::uint64_t max_output);
/// Deterministic zip; members deflated unless `store` is set.
std::string build_zip(std::span<const ArchiveMember> members, bool store = false);

} // namespace sentinel

#include "sentinel/archive.hpp"

#include "sentinel/error.hpp"
#include "sentinel/text.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <map>

namespace fs = std::filesystem;

namespace sentinel {

std::string_view to_string(FileKind kind) {
  switch (kind) {
  case FileKind::PythonSource: return "python-source";
  case FileKind::PkgInfo: return "pkg-info";
  case FileKind::SetupPy: return "setup-py";
  case FileKind::SetupCfg: return "setup-cfg";
  case FileKind::LicenseFile: return "license-file";
  case FileKind::Other: return "other";
  }
  return "other";
}

namespace {

std::size_t depth_of(std::string_view path) {
  return static_cast<std::size_t>(std::count(path.begin(), path.end(), '/'));
}

std::string_view basename_of(std::string_view path) {
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

} // namespace

const FileEntry* PackageSnapshot::find(std::string_view path) const {
  auto it = std::lower_bound(files.begin(), files.end(), path,
                             [](const FileEntry& e, std::string_view p) { return e.path < p; });
  if (it != files.end() && it->path == path) {
    return &*it;
  }
  return nullptr;
}

const FileEntry* PackageSnapshot::first_of_kind(FileKind kind) const {
  const FileEntry* best = nullptr;
  for (const auto& f : files) {
    if (f.kind == kind && (best == nullptr || depth_of(f.path) < depth_of(best->path))) {
      best = &f;
    }
  }
  return best;
}

FileKind classify_file(std::string_view path) {
  auto base = basename_of(path);
  if (base == "setup.py") {
    return FileKind::SetupPy;
  }
  if (base == "setup.cfg") {
    return FileKind::SetupCfg;
  }
  if (base == "PKG-INFO" || base == "METADATA") {
    return FileKind::PkgInfo;
  }
  if (istarts_with(base, "LICENSE") || istarts_with(base, "COPYING")) {
    return FileKind::LicenseFile;
  }
  if (base.size() > 3 && base.substr(base.size() - 3) == ".py") {
    return FileKind::PythonSource;
  }
  return FileKind::Other;
}

std::optional<std::string> normalize_member_path(std::string_view name) {
  if (name.empty()) {
    return std::nullopt;
  }
  if (name.front() == '/' || name.front() == '\\' ||
      (name.size() >= 2 && name[1] == ':' && std::isalpha(static_cast<unsigned char>(name[0])))) {
    throw Error(ErrorCode::PathTraversal, "absolute member path '" + std::string(name) + "'");
  }
  std::string unified(name);
  std::replace(unified.begin(), unified.end(), '\\', '/');
  std::string out;
  std::size_t start = 0;
  while (start <= unified.size()) {
    auto end = unified.find('/', start);
    if (end == std::string::npos) {
      end = unified.size();
    }
    std::string_view seg(unified.data() + start, end - start);
    if (seg == "..") {
      throw Error(ErrorCode::PathTraversal, "member path escapes root '" + std::string(name) + "'");
    }
    if (!seg.empty() && seg != ".") {
      if (!out.empty()) {
        out += '/';
      }
      out += seg;
    }
    start = end + 1;
  }
  if (out.empty()) {
    return std::nullopt;
  }
  return out;
}

namespace {

/// Collects members while enforcing limits; later duplicates replace earlier ones.
class SnapshotBuilder {
public:
  explicit SnapshotBuilder(const SizeLimits& limits) : limits_(limits) {}

  /// Checks a declared size before any bytes are materialized.
  void reserve(std::string_view path, std::uint64_t size) {
    if (++entries_ > limits_.max_entries) {
      throw Error(ErrorCode::LimitExceeded, "more than " + std::to_string(limits_.max_entries) + " entries");
    }
    if (size > limits_.per_file) {
      throw Error(ErrorCode::LimitExceeded,
                  "entry '" + std::string(path) + "' is " + std::to_string(size) + " bytes (limit " +
                      std::to_string(limits_.per_file) + ")");
    }
    total_ += size;
    if (total_ > limits_.total) {
      throw Error(ErrorCode::LimitExceeded,
                  "decompressed total exceeds " + std::to_string(limits_.total) + " bytes");
    }
  }

  void add(std::string path, std::string content) {
    auto [it, inserted] = members_.insert_or_assign(std::move(path), std::move(content));
    if (!inserted) {
      warnings_.push_back("duplicate entry '" + it->first + "': later copy kept");
    }
  }

  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  PackageSnapshot finish(bool strip_top_level, std::string fallback_stem) {
    PackageSnapshot snap;
    std::string prefix;
    if (strip_top_level && !members_.empty()) {
      auto first = members_.begin()->first;
      auto slash = first.find('/');
      if (slash != std::string::npos) {
        prefix = first.substr(0, slash + 1);
        for (const auto& [path, _] : members_) {
          if (path.compare(0, prefix.size(), prefix) != 0) {
            prefix.clear();
            break;
          }
        }
      }
    }
    if (!prefix.empty()) {
      snap.root = prefix.substr(0, prefix.size() - 1);
    }
    for (auto& [path, content] : members_) {
      FileEntry e;
      e.path = path.substr(prefix.size());
      e.kind = classify_file(e.path);
      e.size = content.size();
      e.content = std::move(content);
      snap.files.push_back(std::move(e));
    }
    // std::map keeps lexicographic order and stripping a shared prefix preserves it.
    snap.warnings = std::move(warnings_);
    fill_identity(snap, fallback_stem.empty() ? snap.root : fallback_stem);
    return snap;
  }

private:
  static void fill_identity(PackageSnapshot& snap, std::string_view stem) {
    if (const FileEntry* info = snap.first_of_kind(FileKind::PkgInfo)) {
      for (auto line : split_lines(info->content)) {
        if (trim(line).empty()) {
          break;
        }
        auto colon = line.find(':');
        if (colon == std::string_view::npos) {
          continue;
        }
        auto key = trim(line.substr(0, colon));
        auto value = std::string(trim(line.substr(colon + 1)));
        if (iequals(key, "Name") && snap.name.empty()) {
          snap.name = decode_utf8_lossy(value);
        } else if (iequals(key, "Version") && snap.version.empty()) {
          snap.version = decode_utf8_lossy(value);
        }
      }
    }
    if (snap.name.empty() && !stem.empty()) {
      // "name-1.0" or wheel-style "name-1.0-py3-none-any": split at the first
      // dash followed by a digit.
      std::size_t cut = std::string_view::npos;
      for (std::size_t i = 0; i + 1 < stem.size(); ++i) {
        if (stem[i] == '-' && std::isdigit(static_cast<unsigned char>(stem[i + 1]))) {
          cut = i;
          break;
        }
      }
      if (cut == std::string_view::npos) {
        snap.name = std::string(stem);
      } else {
        snap.name = std::string(stem.substr(0, cut));
        if (snap.version.empty()) {
          auto rest = stem.substr(cut + 1);
          snap.version = std::string(rest.substr(0, rest.find('-')));
        }
      }
    }
  }

  const SizeLimits& limits_;
  std::map<std::string, std::string> members_;
  std::vector<std::string> warnings_;
  std::size_t entries_ = 0;
  std::uint64_t total_ = 0;
};

// ---------------------------------------------------------------------------
// gzip

std::string inflate_stream(std::string_view data, int window_bits, std::uint64_t max_output, bool multi_member,
                           ErrorCode overflow_code) {
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) {
    throw Error(ErrorCode::CorruptArchive, "zlib initialization failed");
  }
  std::string out;
  std::array<char, 64 * 1024> chunk{};
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  int rc = Z_OK;
  while (true) {
    zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
      inflateEnd(&zs);
      throw Error(ErrorCode::CorruptArchive, "deflate stream is corrupt");
    }
    std::size_t produced = chunk.size() - zs.avail_out;
    if (out.size() + produced > max_output) {
      inflateEnd(&zs);
      throw Error(overflow_code, "decompressed data exceeds " + std::to_string(max_output) + " bytes");
    }
    out.append(chunk.data(), produced);
    if (rc == Z_STREAM_END) {
      if (multi_member && zs.avail_in > 0) {
        inflateReset(&zs);
        continue;
      }
      break;
    }
    if (rc == Z_BUF_ERROR || (zs.avail_in == 0 && produced == 0)) {
      inflateEnd(&zs);
      throw Error(ErrorCode::CorruptArchive, "truncated compressed stream");
    }
  }
  inflateEnd(&zs);
  return out;
}

// ---------------------------------------------------------------------------
// tar

std::uint64_t parse_tar_number(std::string_view field) {
  if (!field.empty() && (static_cast<unsigned char>(field[0]) & 0x80) != 0) {
    // GNU base-256 encoding.
    std::uint64_t v = static_cast<unsigned char>(field[0]) & 0x7F;
    for (std::size_t i = 1; i < field.size(); ++i) {
      if (v > (UINT64_MAX >> 8)) {
        throw Error(ErrorCode::CorruptArchive, "tar numeric field overflows");
      }
      v = (v << 8) | static_cast<unsigned char>(field[i]);
    }
    return v;
  }
  std::uint64_t v = 0;
  bool any = false;
  for (char c : field) {
    if (c == '\0' || c == ' ') {
      if (any) {
        break;
      }
      continue;
    }
    if (c < '0' || c > '7') {
      throw Error(ErrorCode::CorruptArchive, "invalid octal digit in tar header");
    }
    if (v > (UINT64_MAX >> 3)) {
      throw Error(ErrorCode::CorruptArchive, "tar numeric field overflows");
    }
    v = (v << 3) | static_cast<std::uint64_t>(c - '0');
    any = true;
  }
  return v;
}

std::string_view c_field(std::string_view block, std::size_t off, std::size_t len) {
  auto f = block.substr(off, len);
  auto nul = f.find('\0');
  return nul == std::string_view::npos ? f : f.substr(0, nul);
}

bool header_checksum_ok(std::string_view block) {
  std::uint64_t stored = parse_tar_number(block.substr(148, 8));
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < 512; ++i) {
    sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(block[i]);
  }
  return sum == stored;
}

std::map<std::string, std::string> parse_pax(std::string_view body) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto space = body.find(' ', pos);
    if (space == std::string_view::npos) {
      throw Error(ErrorCode::CorruptArchive, "malformed pax record");
    }
    std::uint64_t len = 0;
    for (std::size_t i = pos; i < space; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(body[i]))) {
        throw Error(ErrorCode::CorruptArchive, "malformed pax record length");
      }
      len = len * 10 + static_cast<std::uint64_t>(body[i] - '0');
      if (len > body.size()) {
        throw Error(ErrorCode::CorruptArchive, "pax record length out of range");
      }
    }
    if (len == 0 || pos + len > body.size() || body[pos + len - 1] != '\n') {
      throw Error(ErrorCode::CorruptArchive, "malformed pax record");
    }
    auto record = body.substr(space + 1, pos + len - space - 2);
    auto eq = record.find('=');
    if (eq != std::string_view::npos) {
      out[std::string(record.substr(0, eq))] = std::string(record.substr(eq + 1));
    }
    pos += len;
  }
  return out;
}

void read_tar(std::string_view tar, SnapshotBuilder& builder) {
  std::size_t pos = 0;
  std::optional<std::string> long_name;
  std::map<std::string, std::string> pax;
  while (true) {
    if (pos + 512 > tar.size()) {
      if (pos == tar.size()) {
        break; // tolerate a missing end-of-archive marker
      }
      throw Error(ErrorCode::CorruptArchive, "truncated tar header");
    }
    auto block = tar.substr(pos, 512);
    if (std::all_of(block.begin(), block.end(), [](char c) { return c == '\0'; })) {
      break;
    }
    if (!header_checksum_ok(block)) {
      throw Error(ErrorCode::CorruptArchive, "tar header checksum mismatch at offset " + std::to_string(pos));
    }
    std::uint64_t size = parse_tar_number(block.substr(124, 12));
    char type = block[156];
    std::size_t data_start = pos + 512;
    std::uint64_t padded = (size + 511) / 512 * 512;
    if (size > tar.size() - data_start) {
      throw Error(ErrorCode::CorruptArchive, "tar entry data runs past end of archive");
    }
    auto data = tar.substr(data_start, static_cast<std::size_t>(size));
    pos = static_cast<std::size_t>(std::min<std::uint64_t>(data_start + padded, tar.size()));

    if (type == 'L') {
      long_name = std::string(c_field(data, 0, data.size()));
      continue;
    }
    if (type == 'K') {
      continue;
    }
    if (type == 'x') {
      pax = parse_pax(data);
      continue;
    }
    if (type == 'g') {
      continue;
    }

    std::string name;
    if (auto it = pax.find("path"); it != pax.end()) {
      name = it->second;
    } else if (long_name) {
      name = *long_name;
    } else {
      auto base = c_field(block, 0, 100);
      auto magic = block.substr(257, 5);
      auto prefix = magic == "ustar" ? c_field(block, 345, 155) : std::string_view{};
      name = prefix.empty() ? std::string(base) : std::string(prefix) + "/" + std::string(base);
    }
    if (auto it = pax.find("size"); it != pax.end() && (type == '0' || type == '\0' || type == '7')) {
      // pax size overrides are only honored when consistent with the stored data.
      if (std::to_string(size) != it->second) {
        throw Error(ErrorCode::CorruptArchive, "pax size disagrees with header for '" + name + "'");
      }
    }
    long_name.reset();
    pax.clear();

    auto normalized = normalize_member_path(name); // throws on traversal for every entry type
    switch (type) {
    case '0':
    case '\0':
    case '7':
      if (normalized) {
        builder.reserve(*normalized, size);
        builder.add(*normalized, std::string(data));
      }
      break;
    case '5':
      break;
    case '1':
    case '2':
      builder.warn("skipped link entry '" + name + "'");
      break;
    case '3':
    case '4':
    case '6':
      builder.warn("skipped device or fifo entry '" + name + "'");
      break;
    default:
      builder.warn(std::string("skipped entry '") + name + "' with unknown type '" + type + "'");
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// zip

std::uint32_t le32(std::string_view s, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
  }
  return v;
}

std::uint16_t le16(std::string_view s, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[off]) |
                                    (static_cast<unsigned char>(s[off + 1]) << 8));
}

std::uint64_t le64(std::string_view s, std::size_t off) {
  return static_cast<std::uint64_t>(le32(s, off)) | (static_cast<std::uint64_t>(le32(s, off + 4)) << 32);
}

void read_zip(std::string_view zip, SnapshotBuilder& builder) {
  constexpr std::uint32_t kEocd = 0x06054b50;
  constexpr std::uint32_t kCentral = 0x02014b50;
  constexpr std::uint32_t kLocal = 0x04034b50;
  if (zip.size() < 22) {
    throw Error(ErrorCode::CorruptArchive, "zip too small");
  }
  std::size_t eocd = std::string_view::npos;
  std::size_t lowest = zip.size() > 22 + 65535 ? zip.size() - 22 - 65535 : 0;
  for (std::size_t i = zip.size() - 22 + 1; i-- > lowest;) {
    if (le32(zip, i) == kEocd) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string_view::npos) {
    throw Error(ErrorCode::CorruptArchive, "zip end-of-central-directory record not found");
  }
  std::uint64_t count = le16(zip, eocd + 10);
  std::uint64_t cd_size = le32(zip, eocd + 12);
  std::uint64_t cd_offset = le32(zip, eocd + 16);
  if (count == 0xFFFF || cd_offset == 0xFFFFFFFF || cd_size == 0xFFFFFFFF) {
    // zip64 locator sits right before the classic record.
    if (eocd < 20 || le32(zip, eocd - 20) != 0x07064b50) {
      throw Error(ErrorCode::CorruptArchive, "zip64 locator missing");
    }
    std::uint64_t z64 = le64(zip, eocd - 20 + 8);
    if (z64 + 56 > zip.size() || le32(zip, static_cast<std::size_t>(z64)) != 0x06064b50) {
      throw Error(ErrorCode::CorruptArchive, "zip64 end record invalid");
    }
    count = le64(zip, static_cast<std::size_t>(z64) + 32);
    cd_size = le64(zip, static_cast<std::size_t>(z64) + 40);
    cd_offset = le64(zip, static_cast<std::size_t>(z64) + 48);
  }
  if (cd_offset > zip.size() || cd_size > zip.size() - cd_offset) {
    throw Error(ErrorCode::CorruptArchive, "central directory out of range");
  }
  std::size_t pos = static_cast<std::size_t>(cd_offset);
  for (std::uint64_t n = 0; n < count; ++n) {
    if (pos + 46 > zip.size() || le32(zip, pos) != kCentral) {
      throw Error(ErrorCode::CorruptArchive, "bad central directory entry");
    }
    std::uint16_t made_by = le16(zip, pos + 4);
    std::uint16_t flags = le16(zip, pos + 8);
    std::uint16_t method = le16(zip, pos + 10);
    std::uint32_t crc = le32(zip, pos + 16);
    std::uint64_t csize = le32(zip, pos + 20);
    std::uint64_t usize = le32(zip, pos + 24);
    std::uint16_t name_len = le16(zip, pos + 28);
    std::uint16_t extra_len = le16(zip, pos + 30);
    std::uint16_t comment_len = le16(zip, pos + 32);
    std::uint32_t ext_attr = le32(zip, pos + 38);
    std::uint64_t local = le32(zip, pos + 42);
    if (pos + 46 + name_len + extra_len + comment_len > zip.size()) {
      throw Error(ErrorCode::CorruptArchive, "central directory entry truncated");
    }
    std::string name(zip.substr(pos + 46, name_len));
    auto extra = zip.substr(pos + 46 + name_len, extra_len);
    for (std::size_t e = 0; e + 4 <= extra.size();) {
      std::uint16_t id = le16(extra, e);
      std::uint16_t len = le16(extra, e + 2);
      if (e + 4 + len > extra.size()) {
        break;
      }
      if (id == 0x0001) {
        std::size_t f = e + 4;
        if (usize == 0xFFFFFFFF && f + 8 <= e + 4 + len) {
          usize = le64(extra, f);
          f += 8;
        }
        if (csize == 0xFFFFFFFF && f + 8 <= e + 4 + len) {
          csize = le64(extra, f);
          f += 8;
        }
        if (local == 0xFFFFFFFF && f + 8 <= e + 4 + len) {
          local = le64(extra, f);
        }
      }
      e += 4 + len;
    }
    pos += 46 + name_len + extra_len + comment_len;

    auto normalized = normalize_member_path(name);
    bool is_dir = !name.empty() && (name.back() == '/' || name.back() == '\\');
    std::uint32_t unix_mode = (made_by >> 8) == 3 ? (ext_attr >> 16) : 0;
    if (is_dir || !normalized) {
      continue;
    }
    if ((unix_mode & 0170000) == 0120000) {
      builder.warn("skipped link entry '" + name + "'");
      continue;
    }
    if ((unix_mode & 0170000) != 0 && (unix_mode & 0170000) != 0100000) {
      builder.warn("skipped special entry '" + name + "'");
      continue;
    }
    if ((flags & 1) != 0) {
      builder.warn("skipped encrypted entry '" + name + "'");
      continue;
    }
    if (method != 0 && method != 8) {
      builder.warn("skipped entry '" + name + "' with unsupported compression method " + std::to_string(method));
      continue;
    }
    builder.reserve(*normalized, usize);
    if (local + 30 > zip.size() || le32(zip, static_cast<std::size_t>(local)) != kLocal) {
      throw Error(ErrorCode::CorruptArchive, "bad local header for '" + name + "'");
    }
    std::size_t data_off = static_cast<std::size_t>(local) + 30 + le16(zip, static_cast<std::size_t>(local) + 26) +
                           le16(zip, static_cast<std::size_t>(local) + 28);
    if (data_off > zip.size() || csize > zip.size() - data_off) {
      throw Error(ErrorCode::CorruptArchive, "entry data out of range for '" + name + "'");
    }
    auto compressed = zip.substr(data_off, static_cast<std::size_t>(csize));
    std::string content;
    if (method == 0) {
      if (csize != usize) {
        throw Error(ErrorCode::CorruptArchive, "stored entry size mismatch for '" + name + "'");
      }
      content = std::string(compressed);
    } else {
      content = inflate_stream(compressed, -MAX_WBITS, usize, false, ErrorCode::LimitExceeded);
      if (content.size() != usize) {
        throw Error(ErrorCode::CorruptArchive, "inflated size mismatch for '" + name + "'");
      }
    }
    auto actual_crc = crc32(0L, reinterpret_cast<const Bytef*>(content.data()), static_cast<uInt>(content.size()));
    if (actual_crc != crc) {
      throw Error(ErrorCode::CorruptArchive, "crc mismatch for '" + name + "'");
    }
    builder.add(*normalized, std::move(content));
  }
}

// ---------------------------------------------------------------------------
// directory

void read_directory(const fs::path& root, SnapshotBuilder& builder) {
  std::error_code ec;
  std::vector<fs::path> paths;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::none, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      throw Error(ErrorCode::IoError, "cannot walk " + root.string() + ": " + ec.message());
    }
    const auto& entry = *it;
    auto rel = fs::relative(entry.path(), root, ec).generic_string();
    if (entry.is_symlink(ec)) {
      builder.warn("skipped link entry '" + rel + "'");
      if (entry.is_directory(ec)) {
        it.disable_recursion_pending();
      }
      continue;
    }
    if (entry.is_directory(ec)) {
      continue;
    }
    if (!entry.is_regular_file(ec)) {
      builder.warn("skipped special entry '" + rel + "'");
      continue;
    }
    paths.push_back(entry.path());
  }
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot walk " + root.string() + ": " + ec.message());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    auto rel = fs::relative(p, root).generic_string();
    auto normalized = normalize_member_path(rel);
    if (!normalized) {
      continue;
    }
    builder.reserve(*normalized, fs::file_size(p));
    builder.add(*normalized, read_file(p));
  }
}

enum class Format { TarGz, Zip, Directory };

Format detect_format(const fs::path& path, std::string& stem) {
  if (fs::is_directory(path)) {
    stem = path.filename().string();
    return Format::Directory;
  }
  auto name = path.filename().string();
  auto lower = ascii_lower(name);
  auto ends_with = [&](std::string_view suffix) {
    return lower.size() > suffix.size() && lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".tar.gz")) {
    stem = name.substr(0, name.size() - 7);
    return Format::TarGz;
  }
  if (ends_with(".tgz")) {
    stem = name.substr(0, name.size() - 4);
    return Format::TarGz;
  }
  if (ends_with(".zip") || ends_with(".whl")) {
    stem = name.substr(0, name.size() - 4);
    return Format::Zip;
  }
  throw Error(ErrorCode::UnsupportedFormat, "unsupported package format: " + path.string());
}

} // namespace

PackageSnapshot open_package(const fs::path& path, const SizeLimits& limits) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(ErrorCode::IoError, "no such file or directory: " + path.string());
  }
  std::string stem;
  Format format = detect_format(path, stem);
  SnapshotBuilder builder(limits);
  switch (format) {
  case Format::Directory:
    read_directory(path, builder);
    return builder.finish(false, stem);
  case Format::TarGz: {
    auto compressed = read_file(path);
    // Headers and padding cost at most two blocks per entry on top of the payload.
    std::uint64_t cap = limits.total + 512ULL * (2ULL * limits.max_entries + 4);
    auto tar = inflate_stream(compressed, 15 + 16, cap, true, ErrorCode::LimitExceeded);
    read_tar(tar, builder);
    return builder.finish(true, stem);
  }
  case Format::Zip: {
    auto bytes = read_file(path);
    read_zip(bytes, builder);
    return builder.finish(true, stem);
  }
  }
  throw Error(ErrorCode::UnsupportedFormat, path.string());
}

// ---------------------------------------------------------------------------
// writers

namespace {

void put_octal(std::string& block, std::size_t off, std::size_t len, std::uint64_t value) {
  // len-1 octal digits followed by NUL.
  std::string digits(len - 1, '0');
  for (std::size_t i = len - 1; i-- > 0;) {
    digits[i] = static_cast<char>('0' + (value & 7));
    value >>= 3;
  }
  block.replace(off, len - 1, digits);
  block[off + len - 1] = '\0';
}

std::string tar_header(std::string_view name, std::uint64_t size, char type, std::string_view link) {
  std::string block(512, '\0');
  std::string_view prefix;
  std::string_view base = name;
  if (name.size() > 100) {
    auto cut = name.rfind('/', 155);
    if (cut != std::string_view::npos && name.size() - cut - 1 <= 100) {
      prefix = name.substr(0, cut);
      base = name.substr(cut + 1);
    }
  }
  block.replace(0, std::min<std::size_t>(base.size(), 100), base.substr(0, 100));
  put_octal(block, 100, 8, type == '5' ? 0755 : 0644);
  put_octal(block, 108, 8, 0);
  put_octal(block, 116, 8, 0);
  put_octal(block, 124, 12, size);
  put_octal(block, 136, 12, 0);
  block[156] = type;
  block.replace(157, std::min<std::size_t>(link.size(), 100), link.substr(0, 100));
  block.replace(257, 6, std::string_view("ustar\0", 6));
  block.replace(263, 2, "00");
  block.replace(345, std::min<std::size_t>(prefix.size(), 155), prefix.substr(0, 155));
  std::fill(block.begin() + 148, block.begin() + 156, ' ');
  std::uint64_t sum = 0;
  for (char c : block) {
    sum += static_cast<unsigned char>(c);
  }
  put_octal(block, 148, 7, sum);
  block[155] = ' ';
  return block;
}

void append_padded(std::string& out, std::string_view data) {
  out.append(data);
  out.append((512 - data.size() % 512) % 512, '\0');
}

} // namespace

std::string build_tar(std::span<const ArchiveMember> members) {
  std::string out;
  for (const auto& m : members) {
    char type = '0';
    switch (m.type) {
    case ArchiveMember::Type::File: type = '0'; break;
    case ArchiveMember::Type::Directory: type = '5'; break;
    case ArchiveMember::Type::Symlink: type = '2'; break;
    case ArchiveMember::Type::CharDevice: type = '3'; break;
    }
    bool fits = m.name.size() <= 100;
    if (!fits) {
      auto cut = std::string_view(m.name).rfind('/', 155);
      fits = cut != std::string_view::npos && m.name.size() - cut - 1 <= 100;
    }
    if (!fits) {
      std::string long_name = m.name + '\0';
      out += tar_header("././@LongLink", long_name.size(), 'L', {});
      append_padded(out, long_name);
    }
    std::uint64_t size = type == '0' ? m.content.size() : 0;
    out += tar_header(m.name, size, type, m.link_target);
    if (type == '0') {
      append_padded(out, m.content);
    }
  }
  out.append(1024, '\0');
  return out;
}

std::string gzip_compress(std::string_view data, int level) {
  z_stream zs{};
  if (deflateInit2(&zs, level, Z_DEFLATED, 15 + 16, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::IoError, "zlib initialization failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 64);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    throw Error(ErrorCode::IoError, "gzip compression failed");
  }
  out.resize(zs.total_out);
  return out;
}

std::string gzip_decompress(std::string_view data, std::uint64_t max_output) {
  return inflate_stream(data, 15 + 16, max_output, true, ErrorCode::LimitExceeded);
}

namespace {

std::string raw_deflate(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, 9, Z_DEFLATED, -MAX_WBITS, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::IoError, "zlib initialization failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 64);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    throw Error(ErrorCode::IoError, "deflate failed");
  }
  out.resize(zs.total_out);
  return out;
}

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

} // namespace

std::string build_zip(std::span<const ArchiveMember> members, bool store) {
  std::string out;
  std::string central;
  constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1; // 1980-01-01
  for (const auto& m : members) {
    bool is_file = m.type == ArchiveMember::Type::File;
    std::string_view payload = m.type == ArchiveMember::Type::Symlink ? std::string_view(m.link_target)
                                                                      : std::string_view(m.content);
    if (!is_file && m.type != ArchiveMember::Type::Symlink) {
      payload = {};
    }
    auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
    bool deflated = !store && is_file && !payload.empty();
    std::string data = deflated ? raw_deflate(payload) : std::string(payload);
    std::uint16_t method = deflated ? 8 : 0;
    std::uint32_t mode = 0100644;
    if (m.type == ArchiveMember::Type::Directory) mode = 040755;
    if (m.type == ArchiveMember::Type::Symlink) mode = 0120777;
    if (m.type == ArchiveMember::Type::CharDevice) mode = 020644;
    auto offset = static_cast<std::uint32_t>(out.size());

    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, 0);
    put16(out, method);
    put16(out, 0);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(data.size()));
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put16(out, static_cast<std::uint16_t>(m.name.size()));
    put16(out, 0);
    out += m.name;
    out += data;

    put32(central, 0x02014b50);
    put16(central, (3 << 8) | 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, method);
    put16(central, 0);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(data.size()));
    put32(central, static_cast<std::uint32_t>(payload.size()));
    put16(central, static_cast<std::uint16_t>(m.name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, mode << 16);
    put32(central, offset);
    central += m.name;
  }
  auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(members.size()));
  put16(out, static_cast<std::uint16_t>(members.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

} // namespace sentinel

#include "sentinel/serial.hpp"

#include "sentinel/error.hpp"

#include <bit>
#include <cstring>

namespace sentinel {

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u64(s.size());
  buf_.append(s);
}

void ByteWriter::f64s(std::span<const double> values) {
  u64(values.size());
  for (double v : values) {
    f64(v);
  }
}

void ByteWriter::u32s(std::span<const std::uint32_t> values) {
  u64(values.size());
  for (auto v : values) {
    u32(v);
  }
}

void ByteWriter::strs(std::span<const std::string> values) {
  u64(values.size());
  for (const auto& v : values) {
    str(v);
  }
}

void ByteReader::need(std::size_t n) const {
  if (n > remaining()) {
    throw Error(ErrorCode::Corrupt, "unexpected end of data");
  }
}

std::size_t ByteReader::count() {
  std::uint64_t n = u64();
  // Every element occupies at least one byte, so a larger count is corrupt.
  if (n > remaining()) {
    throw Error(ErrorCode::Corrupt, "element count exceeds remaining data");
  }
  return static_cast<std::size_t>(n);
}

std::uint8_t ByteReader::u8() {
  need(1);
  return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 8;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

bool ByteReader::boolean() {
  auto v = u8();
  if (v > 1) {
    throw Error(ErrorCode::Corrupt, "invalid boolean byte");
  }
  return v == 1;
}

std::string ByteReader::str() {
  auto n = count();
  return std::string(raw(n));
}

std::string_view ByteReader::raw(std::size_t n) {
  need(n);
  auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::vector<double> ByteReader::f64s() {
  auto n = count();
  need(n * 8);
  std::vector<double> out(n);
  for (auto& v : out) {
    v = f64();
  }
  return out;
}

std::vector<std::uint32_t> ByteReader::u32s() {
  auto n = count();
  need(n * 4);
  std::vector<std::uint32_t> out(n);
  for (auto& v : out) {
    v = u32();
  }
  return out;
}

std::vector<std::string> ByteReader::strs() {
  auto n = count();
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(str());
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace sentinel

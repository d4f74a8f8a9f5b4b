#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

/// Little-endian binary writer used by the model file format.
class ByteWriter {
public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v);
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(std::string_view s);
  void raw(std::string_view bytes) { buf_.append(bytes); }
  void f64s(std::span<const double> values);
  void u32s(std::span<const std::uint32_t> values);
  void strs(std::span<const std::string> values);

  const std::string& bytes() const noexcept { return buf_; }
  std::string take() noexcept { return std::move(buf_); }

private:
  std::string buf_;
};

/// Bounds-checked reader; any overrun throws Error(Corrupt).
class ByteReader {
public:
  explicit ByteReader(std::string_view bytes) : data_(bytes) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64();
  bool boolean();
  std::string str();
  std::string_view raw(std::size_t n);
  std::vector<double> f64s();
  std::vector<std::uint32_t> u32s();
  std::vector<std::string> strs();

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool done() const noexcept { return pos_ == data_.size(); }

private:
  void need(std::size_t n) const;
  std::size_t count();

  std::string_view data_;
  std::size_t pos_ = 0;
};

/// 64-bit FNV-1a, used as the model body checksum.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace sentinel

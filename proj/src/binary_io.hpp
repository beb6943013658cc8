#pragma once

#include <bit>
#include <cmath>
#include <iosfwd>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "voxenc/errors.hpp"

namespace voxenc::detail {

// Little-endian encoder; byte order is fixed regardless of host.
class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  template <typename U>
  void unsigned_le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u16(std::uint16_t v) { unsigned_le(v); }
  void u32(std::uint32_t v) { unsigned_le(v); }
  void u64(std::uint64_t v) { unsigned_le(v); }
  void i32(std::int32_t v) { unsigned_le(static_cast<std::uint32_t>(v)); }
  void f32(float v) { unsigned_le(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { unsigned_le(std::bit_cast<std::uint64_t>(v)); }

  void short_string(const std::string& s) {
    if (s.size() > 0xFFFF) throw InputError("string field longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }

  std::vector<char>& buffer() { return buf_; }

 private:
  std::vector<char> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const char> data) : data_(data) {}

  void need(std::size_t n, const char* what) const {
    if (data_.size() - pos_ < n)
      throw FormatError(FormatError::Reason::truncated,
                        std::string("truncated input while reading ") + what);
  }
  template <typename U>
  U unsigned_le(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  std::uint16_t u16(const char* what) { return unsigned_le<std::uint16_t>(what); }
  std::uint32_t u32(const char* what) { return unsigned_le<std::uint32_t>(what); }
  std::uint64_t u64(const char* what) { return unsigned_le<std::uint64_t>(what); }
  std::int32_t i32(const char* what) { return static_cast<std::int32_t>(u32(what)); }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  std::string fixed(std::size_t n, const char* what) {
    need(n, what);
    std::string s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  std::string short_string(const char* what) { return fixed(u16(what), what); }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  std::span<const char> data_;
  std::size_t pos_ = 0;
};

std::vector<char> read_all(std::istream& in);
std::vector<char> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const char> bytes);

// Reads float32 payloads row-major into a double/float destination, rejecting
// NaN/Inf. `count` must already be validated against the remaining bytes.
template <typename Out>
void read_f32_payload(ByteReader& r, std::size_t count, Out* dst) {
  for (std::size_t i = 0; i < count; ++i) {
    const float v = r.f32("payload");
    if (!std::isfinite(v))
      throw FormatError(FormatError::Reason::non_finite,
                        "non-finite value at payload index " + std::to_string(i));
    dst[i] = static_cast<Out>(v);
  }
}

}  // namespace voxenc::detail

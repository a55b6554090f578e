#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace commhash {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

void append_u16_be(Bytes& out, std::uint16_t v);
void append_u32_be(Bytes& out, std::uint32_t v);
void append(Bytes& out, ByteSpan data);

Bytes to_bytes(std::string_view s);
std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);

// Sequential big-endian reader over a borrowed buffer. Reads past the end
// throw EncodingError.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16_be();
  std::uint32_t u32_be();
  ByteSpan take(std::size_t n);
  ByteSpan rest();

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  // Throws unless the whole buffer was consumed.
  void expect_done() const;

 private:
  ByteSpan data_;
  std::size_t pos_ = 0;
};

}  // namespace commhash

#pragma once

#include <array>
#include <cstdint>

#include "commhash/bytes.hpp"

namespace commhash {

using Sha256Digest = std::array<std::uint8_t, 32>;

class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(ByteSpan data);
  Sha256& update_u32_be(std::uint32_t v);
  Sha256Digest finish();

 private:
  void* ctx_;
};

Sha256Digest sha256(ByteSpan data);
Sha256Digest hmac_sha256(ByteSpan key, ByteSpan data);

// Constant-time equality for equal-length buffers; false on length mismatch.
bool equal_ct(ByteSpan a, ByteSpan b);

}  // namespace commhash

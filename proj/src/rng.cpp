#include "commhash/rng.hpp"

#include <openssl/rand.h>

#include <stdexcept>

namespace commhash {

Rng::Rng(std::uint64_t seed) {
  Bytes b = to_bytes("commhash/rng/u64");
  append_u32_be(b, static_cast<std::uint32_t>(seed >> 32));
  append_u32_be(b, static_cast<std::uint32_t>(seed));
  key_ = sha256(b);
}

Rng::Rng(ByteSpan seed) {
  Bytes b = to_bytes("commhash/rng/bytes");
  append(b, seed);
  key_ = sha256(b);
}

Rng Rng::from_os() {
  Bytes seed(32);
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("OS entropy unavailable");
  }
  return Rng(seed);
}

void Rng::refill() {
  Sha256 h;
  h.update(key_);
  h.update_u32_be(static_cast<std::uint32_t>(counter_ >> 32));
  h.update_u32_be(static_cast<std::uint32_t>(counter_));
  block_ = h.finish();
  ++counter_;
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) refill();
    b = block_[used_++];
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

Rng::result_type Rng::operator()() {
  std::uint8_t b[8];
  fill(b);
  result_type v = 0;
  for (auto byte : b) v = v << 8 | byte;
  return v;
}

BigInt Rng::below(const BigInt& bound) {
  if (bound <= 0) throw std::invalid_argument("Rng::below: bound must be positive");
  std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  std::size_t nbytes = (bits + 7) / 8;
  unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
  Bytes buf(nbytes);
  for (;;) {
    fill(buf);
    buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
    BigInt v = decode_be(buf);
    if (v < bound) return v;
  }
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  std::uint64_t limit = max() - max() % bound;
  for (;;) {
    std::uint64_t v = (*this)();
    if (v < limit) return v % bound;
  }
}

Rng Rng::fork(std::string_view label) {
  Bytes seed = bytes(32);
  append(seed, to_bytes(label));
  return Rng(seed);
}

}  // namespace commhash

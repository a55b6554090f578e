#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "commhash/bigint.hpp"
#include "commhash/bytes.hpp"
#include "commhash/hash.hpp"

namespace commhash {

// Deterministic byte stream: SHA-256 over (seed key || block counter).
// Every protocol role draws from one of these so whole runs replay from a
// single seed. Rng::from_os() seeds from the OS entropy pool.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  explicit Rng(ByteSpan seed);
  static Rng from_os();

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  // Uniform in [0, bound) by rejection sampling; bound must be positive.
  BigInt below(const BigInt& bound);
  std::uint64_t below(std::uint64_t bound);

  // Independent child stream keyed by label.
  Rng fork(std::string_view label);

 private:
  void refill();

  Sha256Digest key_{};
  std::uint64_t counter_ = 0;
  Sha256Digest block_{};
  std::size_t used_ = block_.size();
};

}  // namespace commhash

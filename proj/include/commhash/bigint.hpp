#pragma once

#include <gmpxx.h>

#include <cstddef>

#include "commhash/bytes.hpp"

namespace commhash {

using BigInt = mpz_class;

// Number of bytes in the minimal big-endian encoding of |v| (at least 1).
std::size_t byte_length(const BigInt& v);

// Fixed-width big-endian encoding; throws EncodingError if v does not fit.
Bytes encode_be(const BigInt& v, std::size_t width);
BigInt decode_be(ByteSpan data);

// Least non-negative residue.
BigInt mod(const BigInt& v, const BigInt& m);
BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& m);
// Throws std::domain_error when v is not invertible mod m.
BigInt invert(const BigInt& v, const BigInt& m);

// Probabilistic primality with error below 2^-64.
bool is_probable_prime(const BigInt& v);

}  // namespace commhash

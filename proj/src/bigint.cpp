#include "commhash/bigint.hpp"

#include <stdexcept>

#include "commhash/errors.hpp"

namespace commhash {

std::size_t byte_length(const BigInt& v) {
  if (v == 0) return 1;
  return (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
}

Bytes encode_be(const BigInt& v, std::size_t width) {
  if (v < 0) throw EncodingError("cannot encode negative integer");
  std::size_t len = v == 0 ? 0 : byte_length(v);
  if (len > width) throw EncodingError("integer does not fit encoding width");
  Bytes out(width, 0);
  if (len > 0) {
    std::size_t written = 0;
    mpz_export(out.data() + (width - len), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
  return out;
}

BigInt decode_be(ByteSpan data) {
  BigInt out;
  if (!data.empty()) mpz_import(out.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
  return out;
}

BigInt mod(const BigInt& v, const BigInt& m) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
  return r;
}

BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& m) {
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return r;
}

BigInt invert(const BigInt& v, const BigInt& m) {
  BigInt r;
  if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw std::domain_error("value is not invertible");
  }
  return r;
}

bool is_probable_prime(const BigInt& v) {
  if (v < 2) return false;
  return mpz_probab_prime_p(v.get_mpz_t(), 64) != 0;
}

}  // namespace commhash

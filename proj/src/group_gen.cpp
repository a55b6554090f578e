#include <stdexcept>
#include <string>

#include "commhash/group.hpp"
#include "commhash/rng.hpp"
#include "ec_internal.hpp"

namespace commhash {

namespace {

constexpr int kMaxDeriveAttempts = 1000;
constexpr char kSecondGeneratorProvenance[] = "hash-to-group:";

const char kRfc3526Modp2048[] =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

const char kRfc3526Modp3072[] =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AAAC42DAD33170D04507A33"
    "A85521ABDF1CBA64ECFB850458DBEF0A8AEA71575D060C7DB3970F85A6E1E4C7"
    "ABF5AE8CDB0933D71E8C94E04A25619DCEE3D2261AD2EE6BF12FFA06D98A0864"
    "D87602733EC86A64521F2B18177B200CBBE117577A615D6C770988C0BAD946E2"
    "08E24FA074E5AB3143DB5BFCE0FD108E4B82D120A93AD2CAFFFFFFFFFFFFFFFF";

BigInt hex_int(const char* hex) { return BigInt(hex, 16); }

// Uniform-looking integer mod `modulus` from (label, counter).
BigInt hash_to_int(ByteSpan label, std::uint32_t counter, const BigInt& modulus) {
  std::size_t want = byte_length(modulus) + 16;
  Bytes stream;
  for (std::uint32_t block = 0; stream.size() < want; ++block) {
    Sha256 h;
    h.update(to_bytes("commhash/hash-to-group"));
    h.update_u32_be(static_cast<std::uint32_t>(label.size()));
    h.update(label);
    h.update_u32_be(counter);
    h.update_u32_be(block);
    auto d = h.finish();
    append(stream, d);
  }
  stream.resize(want);
  return mod(decode_be(stream), modulus);
}

bool is_generator(const BigInt& g, const BigInt& p, const BigInt& q, ModpMode mode) {
  if (g <= 1 || g >= p - 1) return false;
  BigInt to_q = powm(g, q, p);
  return mode == ModpMode::kSubgroup ? to_q == 1 : to_q == p - 1;
}

// Primitive root by order checks g^2 != 1, g^q != 1; squared in subgroup mode.
template <typename NextCandidate>
BigInt find_first_generator(const BigInt& p, const BigInt& q, ModpMode mode,
                            NextCandidate next) {
  for (int attempt = 0; attempt < kMaxDeriveAttempts; ++attempt) {
    BigInt g = next();
    if (g <= 1 || g >= p - 1) continue;
    if (powm(g, 2, p) == 1 || powm(g, q, p) == 1) continue;
    return mode == ModpMode::kSubgroup ? mod(g * g, p) : g;
  }
  throw std::runtime_error("generator search exhausted");
}

GroupParams finish_with_derived_b(GroupParams params) {
  const Bytes label = to_bytes(kDefaultGeneratorLabel);
  GroupElement b = derive_second_generator(params, label);
  return params.with_b(std::move(b), std::string(kSecondGeneratorProvenance) + kDefaultGeneratorLabel);
}

GroupParams search_modp(unsigned bits, std::uint64_t seed, ModpMode mode) {
  Rng rng(seed);
  const std::size_t max_attempts = 200ull * bits * bits + 1000;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    // q has bits-1 bits with the top bit set, so p = 2q+1 has exactly `bits`.
    BigInt q = rng.below(BigInt(1) << (bits - 2)) + (BigInt(1) << (bits - 2));
    if (mpz_even_p(q.get_mpz_t())) q += 1;
    BigInt p = 2 * q + 1;
    if (mpz_sizeinbase(p.get_mpz_t(), 2) != bits) continue;
    if (mpz_probab_prime_p(q.get_mpz_t(), 1) == 0) continue;
    if (mpz_probab_prime_p(p.get_mpz_t(), 1) == 0) continue;
    if (!is_probable_prime(q) || !is_probable_prime(p)) continue;

    BigInt a = find_first_generator(p, q, mode, [&]() -> BigInt { return rng.below(p - 3) + 2; });
    return finish_with_derived_b(GroupParams::modp(p, q, mode, a, a));
  }
  throw std::runtime_error("safe-prime search exhausted");
}

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (e != 0) {
    if (e & 1) r = mulmod64(r, base, m);
    base = mulmod64(base, base, m);
    e >>= 1;
  }
  return r;
}

// #E(GF(p)) by direct count; p is a small odd prime.
std::uint64_t count_points(std::uint64_t p, std::uint64_t a, std::uint64_t b) {
  std::uint64_t count = 1;  // point at infinity
  for (std::uint64_t x = 0; x < p; ++x) {
    std::uint64_t rhs = (mulmod64(mulmod64(x, x, p), x, p) + mulmod64(a, x, p) + b) % p;
    if (rhs == 0) {
      count += 1;
    } else if (powmod64(rhs, (p - 1) / 2, p) == 1) {
      count += 2;
    }
  }
  return count;
}

GroupElement derive_point(const CurveParams& curve, ByteSpan label, const GroupElement* avoid) {
  for (std::uint32_t counter = 0; counter < kMaxDeriveAttempts; ++counter) {
    BigInt x = hash_to_int(label, counter, curve.p);
    BigInt rhs = detail::ec_rhs(curve, x);
    if (rhs == 0) continue;
    auto y = detail::sqrt_mod(rhs, curve.p);
    if (!y) continue;
    // Parity bit from the next hash so both roots are reachable.
    bool want_odd = mpz_odd_p(hash_to_int(label, counter + 0x80000000u, BigInt(2)).get_mpz_t());
    if (static_cast<bool>(mpz_odd_p(y->get_mpz_t())) != want_odd) *y = curve.p - *y;
    GroupElement P = GroupElement::point(x, *y);
    if (avoid != nullptr && P == *avoid) continue;
    return P;
  }
  throw std::runtime_error("hash-to-curve exhausted");
}

GroupParams search_toy_curve(unsigned bits, std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::uint64_t p = rng.below(std::uint64_t{1} << (bits - 1)) + (std::uint64_t{1} << (bits - 1));
    if (p % 2 == 0 || !is_probable_prime(BigInt(static_cast<unsigned long>(p)))) continue;
    std::uint64_t a = rng.below(p);
    std::uint64_t b = rng.below(p);
    if ((4 * mulmod64(mulmod64(a, a, p), a, p) + 27 * mulmod64(b, b, p)) % p == 0) continue;
    std::uint64_t n = count_points(p, a, b);
    if (n < 5 || !is_probable_prime(BigInt(static_cast<unsigned long>(n)))) continue;

    CurveParams curve{kExplicitCurveId, BigInt(static_cast<unsigned long>(p)),
                      BigInt(static_cast<unsigned long>(a)), BigInt(static_cast<unsigned long>(b)),
                      BigInt(static_cast<unsigned long>(n))};
    Bytes base_label = to_bytes("commhash/generator-a");
    append_u32_be(base_label, static_cast<std::uint32_t>(seed));
    GroupElement A = derive_point(curve, base_label, nullptr);
    return finish_with_derived_b(GroupParams::ec(curve, A, A));
  }
  throw std::runtime_error("toy curve search exhausted");
}

}  // namespace

GroupParams secp256k1() {
  CurveParams curve{
      kSecp256k1Id,
      hex_int("FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F"),
      0,
      7,
      hex_int("FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141")};
  GroupElement G =
      GroupElement::point(hex_int("79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798"),
                          hex_int("483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8"));
  return finish_with_derived_b(GroupParams::ec(curve, G, G));
}

GroupParams rfc3526_modp(unsigned bits, ModpMode mode) {
  BigInt p;
  if (bits == 2048) {
    p = hex_int(kRfc3526Modp2048);
  } else if (bits == 3072) {
    p = hex_int(kRfc3526Modp3072);
  } else {
    throw std::invalid_argument("RFC 3526 group size must be 2048 or 3072");
  }
  BigInt q = (p - 1) / 2;
  BigInt candidate = 1;
  BigInt a = find_first_generator(p, q, mode, [&] { return ++candidate; });
  return finish_with_derived_b(GroupParams::modp(p, q, mode, a, a));
}

GroupParams generate_group(Backend backend, unsigned bits, std::uint64_t seed, ModpMode mode) {
  if (backend == Backend::kModp) {
    if (mode == ModpMode::kNone) throw std::invalid_argument("MODP generation needs a mode");
    if (bits == 2048 || bits == 3072) return rfc3526_modp(bits, mode);
    if (bits >= 5 && bits <= 1024) return search_modp(bits, seed, mode);
    throw std::invalid_argument("unsupported MODP size: " + std::to_string(bits));
  }
  if (bits == 256) return secp256k1();
  if (bits >= 5 && bits <= 16) return search_toy_curve(bits, seed);
  throw std::invalid_argument("unsupported EC size: " + std::to_string(bits));
}

GroupElement derive_second_generator(const GroupParams& params, ByteSpan label) {
  if (label.empty()) throw std::invalid_argument("generator label must be non-empty");
  if (params.backend() == Backend::kEc) return derive_point(params.curve(), label, &params.a());

  const BigInt& p = params.p();
  const BigInt& q = params.order();
  for (std::uint32_t counter = 0; counter < kMaxDeriveAttempts; ++counter) {
    BigInt c = hash_to_int(label, counter, p);
    if (params.mode() == ModpMode::kSubgroup) c = mod(c * c, p);
    if (!is_generator(c, p, q, params.mode())) continue;
    if (GroupElement::residue(c) == params.a()) continue;
    return GroupElement::residue(c);
  }
  throw std::runtime_error("hash-to-group exhausted");
}

}  // namespace commhash

#pragma once

#include <array>
#include <cstdint>

#include "commhash/group.hpp"
#include "commhash/rng.hpp"

// Hashed-ElGamal over the protocol group: Enc_{K^pub}(r) for the nonce echo
// and the sealed transport links.
namespace commhash::pke {

inline constexpr std::size_t kTagSize = 16;
inline constexpr std::size_t kMaxPlaintext = 0xffff;

struct KeyPair {
  Scalar secret;
  GroupElement public_key;
};

struct Ciphertext {
  GroupElement ephemeral;
  Bytes body;
  std::array<std::uint8_t, kTagSize> tag;
};

// Secret drawn uniformly from [1, M-1].
KeyPair gen(const GroupParams& params, Rng& rng);
KeyPair keypair_from_secret(const GroupParams& params, const Scalar& secret);

// ephemeral = e*a, key = SHA-256(encode(e*pub)), body = pt ^ keystream,
// tag = HMAC-SHA256(mac key, encode(ephemeral) || body) truncated to 16 bytes.
Ciphertext encrypt(const GroupParams& params, const GroupElement& public_key, ByteSpan plaintext,
                   Rng& rng);
// Throws AuthenticationError when the tag does not verify.
Bytes decrypt(const GroupParams& params, const Scalar& secret, const Ciphertext& ct);

// encode(ephemeral) || u16-BE body length || body || tag
Bytes encode(const GroupParams& params, const Ciphertext& ct);
// Throws EncodingError for malformed input.
Ciphertext decode(const GroupParams& params, ByteSpan data);
// Size of the ciphertext encoding at the front of `data`, without validating
// the ephemeral element.
std::size_t encoded_size(const GroupParams& params, ByteSpan data);

}  // namespace commhash::pke

#include "commhash/pke.hpp"

#include <algorithm>
#include <stdexcept>

#include "commhash/errors.hpp"
#include "commhash/hash.hpp"

namespace commhash::pke {

namespace {

struct DerivedKeys {
  Sha256Digest enc;
  Sha256Digest mac;
};

DerivedKeys derive(const GroupParams& params, const GroupElement& shared) {
  Bytes seed = to_bytes("commhash/pke/kdf");
  append(seed, commhash::encode(params, shared));
  Sha256Digest master = sha256(seed);
  DerivedKeys out;
  out.enc = Sha256().update(master).update(to_bytes("enc")).finish();
  out.mac = Sha256().update(master).update(to_bytes("mac")).finish();
  return out;
}

void xor_keystream(const Sha256Digest& key, Bytes& data) {
  for (std::size_t offset = 0, block = 0; offset < data.size(); ++block) {
    Sha256Digest ks =
        Sha256().update(key).update_u32_be(static_cast<std::uint32_t>(block)).finish();
    for (std::size_t i = 0; i < ks.size() && offset < data.size(); ++i, ++offset) {
      data[offset] ^= ks[i];
    }
  }
}

std::array<std::uint8_t, kTagSize> compute_tag(const GroupParams& params, const Sha256Digest& mac_key,
                                               const GroupElement& ephemeral, ByteSpan body) {
  Bytes msg = commhash::encode(params, ephemeral);
  append(msg, body);
  Sha256Digest full = hmac_sha256(mac_key, msg);
  std::array<std::uint8_t, kTagSize> tag{};
  std::copy_n(full.begin(), kTagSize, tag.begin());
  return tag;
}

}  // namespace

KeyPair gen(const GroupParams& params, Rng& rng) {
  Scalar secret = params.scalar(rng.below(params.order() - 1) + 1);
  return keypair_from_secret(params, secret);
}

KeyPair keypair_from_secret(const GroupParams& params, const Scalar& secret) {
  if (secret.is_zero()) throw std::invalid_argument("secret key must be nonzero");
  return {secret, power(params, params.a(), secret)};
}

Ciphertext encrypt(const GroupParams& params, const GroupElement& public_key, ByteSpan plaintext,
                   Rng& rng) {
  if (plaintext.size() > kMaxPlaintext) throw std::invalid_argument("plaintext too long");
  if (!is_member(params, public_key) || public_key == params.identity()) {
    throw std::invalid_argument("invalid public key");
  }
  Scalar e = params.scalar(rng.below(params.order() - 1) + 1);
  GroupElement ephemeral = power(params, params.a(), e);
  DerivedKeys keys = derive(params, power(params, public_key, e));
  Bytes body(plaintext.begin(), plaintext.end());
  xor_keystream(keys.enc, body);
  auto tag = compute_tag(params, keys.mac, ephemeral, body);
  return {std::move(ephemeral), std::move(body), tag};
}

Bytes decrypt(const GroupParams& params, const Scalar& secret, const Ciphertext& ct) {
  if (!is_member(params, ct.ephemeral)) throw EncodingError("ciphertext ephemeral not in group");
  DerivedKeys keys = derive(params, power(params, ct.ephemeral, secret));
  auto expected = compute_tag(params, keys.mac, ct.ephemeral, ct.body);
  if (!equal_ct(expected, ct.tag)) throw AuthenticationError("ciphertext authentication failed");
  Bytes pt = ct.body;
  xor_keystream(keys.enc, pt);
  return pt;
}

Bytes encode(const GroupParams& params, const Ciphertext& ct) {
  Bytes out = commhash::encode(params, ct.ephemeral);
  append_u16_be(out, static_cast<std::uint16_t>(ct.body.size()));
  append(out, ct.body);
  append(out, ct.tag);
  return out;
}

std::size_t encoded_size(const GroupParams& params, ByteSpan data) {
  if (data.empty()) throw EncodingError("malformed ciphertext: empty");
  std::size_t elem = element_encoding_size(params, data[0]);
  ByteReader r(data);
  r.take(elem);
  std::size_t body = r.u16_be();
  return elem + 2 + body + kTagSize;
}

Ciphertext decode(const GroupParams& params, ByteSpan data) {
  if (data.empty()) throw EncodingError("malformed ciphertext: empty");
  ByteReader r(data);
  GroupElement ephemeral = decode_element(params, r.take(element_encoding_size(params, data[0])));
  ByteSpan body = r.take(r.u16_be());
  ByteSpan tag = r.take(kTagSize);
  r.expect_done();
  Ciphertext ct{std::move(ephemeral), Bytes(body.begin(), body.end()), {}};
  std::copy(tag.begin(), tag.end(), ct.tag.begin());
  return ct;
}

}  // namespace commhash::pke

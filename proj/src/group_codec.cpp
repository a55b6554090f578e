#include <stdexcept>
#include <string>

#include "commhash/errors.hpp"
#include "commhash/group.hpp"
#include "ec_internal.hpp"

namespace commhash {

namespace {

constexpr std::uint8_t kIdentityByte = 0x00;
constexpr std::uint8_t kEvenY = 0x02;
constexpr std::uint8_t kOddY = 0x03;

Bytes minimal_be(const BigInt& v) { return encode_be(v, byte_length(v)); }

BigInt decode_minimal(ByteSpan data) {
  if (data.empty() || (data.size() > 1 && data[0] == 0)) {
    throw EncodingError("non-canonical integer field");
  }
  return decode_be(data);
}

void append_field(Bytes& out, ByteSpan field) {
  if (field.size() > 0xffff) throw EncodingError("field too long");
  append_u16_be(out, static_cast<std::uint16_t>(field.size()));
  append(out, field);
}

ByteSpan read_field(ByteReader& r) { return r.take(r.u16_be()); }

}  // namespace

Bytes encode(const GroupParams& params, const Scalar& s) {
  if (s.modulus() != params.order()) throw std::invalid_argument("scalar from another group");
  return encode_be(s.value(), params.scalar_width());
}

Scalar decode_scalar(const GroupParams& params, ByteSpan data) {
  if (data.size() != params.scalar_width()) throw EncodingError("malformed scalar: wrong length");
  BigInt v = decode_be(data);
  if (v >= params.order()) throw EncodingError("non-canonical scalar");
  return params.scalar(v);
}

Bytes encode(const GroupParams& params, const GroupElement& g) {
  if (g.backend() != params.backend()) throw std::invalid_argument("group backend mismatch");
  if (params.backend() == Backend::kModp) return encode_be(g.residue_value(), params.field_width());
  if (g.is_infinity()) return Bytes{kIdentityByte};
  Bytes out{mpz_odd_p(g.y().get_mpz_t()) ? kOddY : kEvenY};
  append(out, encode_be(g.x(), params.field_width()));
  return out;
}

std::size_t element_encoding_size(const GroupParams& params, std::uint8_t first_byte) {
  if (params.backend() == Backend::kModp) return params.field_width();
  return first_byte == kIdentityByte ? 1 : 1 + params.field_width();
}

GroupElement decode_element(const GroupParams& params, ByteSpan data) {
  if (params.backend() == Backend::kModp) {
    if (data.size() != params.field_width()) throw EncodingError("malformed element: wrong length");
    auto g = GroupElement::residue(decode_be(data));
    if (!is_member(params, g)) throw EncodingError("element not in group");
    return g;
  }
  if (data.size() == 1 && data[0] == kIdentityByte) return GroupElement::infinity();
  if (data.size() != 1 + params.field_width()) throw EncodingError("malformed point: wrong length");
  if (data[0] != kEvenY && data[0] != kOddY) throw EncodingError("malformed point: bad prefix");
  BigInt x = decode_be(data.subspan(1));
  if (x >= params.p()) throw EncodingError("non-canonical point: x out of range");
  auto y = detail::sqrt_mod(detail::ec_rhs(params.curve(), x), params.p());
  if (!y) throw EncodingError("point not on curve");
  bool odd = data[0] == kOddY;
  if (*y == 0 && odd) throw EncodingError("non-canonical point: odd prefix for y = 0");
  if (static_cast<bool>(mpz_odd_p(y->get_mpz_t())) != odd) *y = params.p() - *y;
  return GroupElement::point(std::move(x), std::move(*y));
}

Bytes encode(const GroupParams& params) {
  Bytes out{static_cast<std::uint8_t>(params.backend()), static_cast<std::uint8_t>(params.mode())};
  if (params.backend() == Backend::kModp) {
    append_field(out, minimal_be(params.p()));
    append_field(out, minimal_be(params.order()));
    append_field(out, encode(params, params.a()));
    append_field(out, encode(params, params.b()));
    return out;
  }
  const CurveParams& c = params.curve();
  append_field(out, to_bytes(c.id));
  append_field(out, encode(params, params.a()));
  append_field(out, encode(params, params.b()));
  if (c.id == kExplicitCurveId) {
    append_field(out, minimal_be(c.p));
    append_field(out, minimal_be(mod(c.a, c.p)));
    append_field(out, minimal_be(mod(c.b, c.p)));
    append_field(out, minimal_be(c.n));
  }
  return out;
}

GroupParams decode_params(ByteSpan data) {
  ByteReader r(data);
  std::uint8_t tag = r.u8();
  std::uint8_t mode_byte = r.u8();
  if (tag == static_cast<std::uint8_t>(Backend::kModp)) {
    if (mode_byte != static_cast<std::uint8_t>(ModpMode::kSubgroup) &&
        mode_byte != static_cast<std::uint8_t>(ModpMode::kPrimitive)) {
      throw EncodingError("malformed params: bad MODP mode");
    }
    BigInt p = decode_minimal(read_field(r));
    BigInt q = decode_minimal(read_field(r));
    ByteSpan a = read_field(r);
    ByteSpan b = read_field(r);
    r.expect_done();
    if (p < 5 || q < 2) throw EncodingError("malformed params: modulus too small");
    auto shell = GroupParams::modp(p, q, static_cast<ModpMode>(mode_byte), 1, 1);
    return GroupParams::modp(p, q, static_cast<ModpMode>(mode_byte),
                             decode_element(shell, a).residue_value(),
                             decode_element(shell, b).residue_value());
  }
  if (tag != static_cast<std::uint8_t>(Backend::kEc)) throw EncodingError("malformed params: bad tag");
  if (mode_byte != static_cast<std::uint8_t>(ModpMode::kNone)) {
    throw EncodingError("malformed params: EC mode byte must be zero");
  }
  ByteSpan id_bytes = read_field(r);
  std::string id(id_bytes.begin(), id_bytes.end());
  ByteSpan a_enc = read_field(r);
  ByteSpan b_enc = read_field(r);

  GroupParams shell = secp256k1();
  if (id == kExplicitCurveId) {
    CurveParams curve{id, decode_minimal(read_field(r)), decode_minimal(read_field(r)),
                      decode_minimal(read_field(r)), decode_minimal(read_field(r))};
    if (curve.p < 3 || curve.n < 2 || curve.a >= curve.p || curve.b >= curve.p) {
      throw EncodingError("malformed params: curve fields out of range");
    }
    shell = GroupParams::ec(curve, GroupElement::infinity(), GroupElement::infinity());
  } else if (id != kSecp256k1Id) {
    throw EncodingError("unknown curve id: " + id);
  }
  r.expect_done();
  auto A = decode_element(shell, a_enc);
  auto B = decode_element(shell, b_enc);
  return GroupParams::ec(shell.curve(), std::move(A), std::move(B));
}

Sha256Digest params_digest(const GroupParams& params) { return sha256(encode(params)); }

}  // namespace commhash

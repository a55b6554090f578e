#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "commhash/bigint.hpp"
#include "commhash/bytes.hpp"
#include "commhash/hash.hpp"

namespace commhash {

namespace detail {
struct FixedBaseCache;
}

enum class Backend : std::uint8_t { kModp = 0x01, kEc = 0x02 };

// kSubgroup: generators of the order-q subgroup of quadratic residues.
// kPrimitive: primitive roots (order 2q). kNone is used by the EC backend.
enum class ModpMode : std::uint8_t { kNone = 0x00, kSubgroup = 0x01, kPrimitive = 0x02 };

/// An exponent-domain value, always reduced modulo the exponent modulus of
/// the group it was created for (q for MODP, n for EC). Arithmetic between
/// scalars of different moduli throws std::invalid_argument.
class Scalar {
 public:
  Scalar(const BigInt& value, std::shared_ptr<const BigInt> modulus);

  const BigInt& value() const { return value_; }
  const BigInt& modulus() const { return *modulus_; }
  bool is_zero() const { return value_ == 0; }

  /// Throws std::domain_error for zero.
  Scalar inverse() const;

  friend Scalar operator+(const Scalar& u, const Scalar& v);
  friend Scalar operator-(const Scalar& u, const Scalar& v);
  friend Scalar operator*(const Scalar& u, const Scalar& v);
  friend Scalar operator-(const Scalar& u);
  Scalar& operator+=(const Scalar& v) { return *this = *this + v; }
  Scalar& operator*=(const Scalar& v) { return *this = *this * v; }

  friend bool operator==(const Scalar& u, const Scalar& v);

 private:
  BigInt value_;
  std::shared_ptr<const BigInt> modulus_;
};

Scalar add(const Scalar& u, const Scalar& v);
Scalar sub(const Scalar& u, const Scalar& v);
Scalar mul(const Scalar& u, const Scalar& v);
Scalar neg(const Scalar& u);
Scalar inv(const Scalar& u);

/// A residue mod p (MODP) or an affine curve point / point at infinity (EC).
/// Membership is checked by the group functions, not by construction.
class GroupElement {
 public:
  static GroupElement residue(BigInt v);
  static GroupElement point(BigInt x, BigInt y);
  static GroupElement infinity();

  Backend backend() const { return backend_; }
  bool is_infinity() const { return infinity_; }
  // MODP value. Throws for EC elements.
  const BigInt& residue_value() const;
  // Affine coordinates. Throw for MODP elements or the point at infinity.
  const BigInt& x() const;
  const BigInt& y() const;

  friend bool operator==(const GroupElement& g, const GroupElement& h);

 private:
  GroupElement(Backend backend, BigInt x, BigInt y, bool infinity)
      : backend_(backend), x_(std::move(x)), y_(std::move(y)), infinity_(infinity) {}

  Backend backend_;
  BigInt x_;
  BigInt y_;
  bool infinity_;
};

/// Short Weierstrass curve y^2 = x^3 + a x + b over GF(p) with prime group
/// order n (no cofactor).
struct CurveParams {
  std::string id;  // "secp256k1" or "explicit"
  BigInt p;
  BigInt a;
  BigInt b;
  BigInt n;
};

inline constexpr char kSecp256k1Id[] = "secp256k1";
inline constexpr char kExplicitCurveId[] = "explicit";
inline constexpr char kDefaultGeneratorLabel[] = "commhash/generator-b";

class GroupParams {
 public:
  static GroupParams modp(BigInt p, BigInt q, ModpMode mode, BigInt a, BigInt b,
                          std::string label = "");
  static GroupParams ec(CurveParams curve, GroupElement base_a, GroupElement base_b,
                        std::string label = "");

  Backend backend() const { return backend_; }
  ModpMode mode() const { return mode_; }
  // Field prime (MODP modulus or curve field).
  const BigInt& p() const { return p_; }
  // Exponent modulus: q for MODP, n for EC.
  const BigInt& order() const { return *order_; }
  const CurveParams& curve() const { return curve_; }
  const GroupElement& a() const { return a_; }
  const GroupElement& b() const { return b_; }
  // Provenance of the second generator, e.g. "hash-to-group:<label>".
  const std::string& label() const { return label_; }

  Scalar scalar(const BigInt& v) const { return Scalar(v, order_); }
  Scalar scalar(long v) const { return Scalar(BigInt(v), order_); }
  GroupElement identity() const;

  // Fixed encoding widths.
  std::size_t scalar_width() const { return byte_length(*order_); }
  std::size_t field_width() const { return byte_length(p_); }

  GroupParams with_b(GroupElement b, std::string label) const;

  // Mathematical content only; the provenance label is not compared.
  friend bool operator==(const GroupParams& x, const GroupParams& y);

  // Lazily built tables for a and b, shared between copies.
  detail::FixedBaseCache* fixed_base() const { return fixed_.get(); }

 private:
  GroupParams() = default;

  Backend backend_ = Backend::kModp;
  ModpMode mode_ = ModpMode::kNone;
  BigInt p_;
  std::shared_ptr<const BigInt> order_;
  CurveParams curve_;
  GroupElement a_ = GroupElement::infinity();
  GroupElement b_ = GroupElement::infinity();
  std::string label_;
  std::shared_ptr<detail::FixedBaseCache> fixed_;
};

// Group law. Mixing backends throws std::invalid_argument.
GroupElement power(const GroupParams& params, const GroupElement& base, const Scalar& e);
// Unreduced non-negative exponent, e.g. for order checks.
GroupElement power(const GroupParams& params, const GroupElement& base, const BigInt& e);
GroupElement combine(const GroupParams& params, const GroupElement& g, const GroupElement& h);
bool is_member(const GroupParams& params, const GroupElement& g);

/// Empty iff every parameter invariant holds.
std::vector<std::string> validate_group(const GroupParams& params);

/// Deterministic parameter generation.
///   MODP: bits in [5, 1024] runs a seeded safe-prime search; 2048 and 3072
///         use the RFC 3526 safe primes. The first generator comes from a
///         seeded primitive-root search (squared in kSubgroup mode).
///   EC:   bits == 256 gives secp256k1 with its standard base point; bits in
///         [5, 16] searches a random prime-order toy curve.
/// The second generator is always hash-derived from kDefaultGeneratorLabel.
/// Throws std::invalid_argument for unsupported sizes and std::runtime_error
/// if the bounded search gives up.
GroupParams generate_group(Backend backend, unsigned bits, std::uint64_t seed,
                           ModpMode mode = ModpMode::kSubgroup);

GroupParams secp256k1();
GroupParams rfc3526_modp(unsigned bits, ModpMode mode = ModpMode::kSubgroup);

/// Hash-to-group generator with unknown discrete log relative to a(). The
/// existing b() of params is ignored. Rejects candidates equal to a().
GroupElement derive_second_generator(const GroupParams& params, ByteSpan label);

// Canonical encodings.
Bytes encode(const GroupParams& params, const Scalar& s);
Bytes encode(const GroupParams& params, const GroupElement& g);
Bytes encode(const GroupParams& params);
Scalar decode_scalar(const GroupParams& params, ByteSpan data);
GroupElement decode_element(const GroupParams& params, ByteSpan data);
GroupParams decode_params(ByteSpan data);
// Size of the element encoding that starts with `first_byte`.
std::size_t element_encoding_size(const GroupParams& params, std::uint8_t first_byte);

Sha256Digest params_digest(const GroupParams& params);

}  // namespace commhash

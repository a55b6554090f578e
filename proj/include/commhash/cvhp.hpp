#pragma once

#include <span>
#include <variant>
#include <vector>

#include "commhash/group.hpp"
#include "commhash/rng.hpp"

namespace commhash {

// A participant's secret exponent pair (x_i, y_i); k_i, l_i on the EC backend.
struct ParticipantKeys {
  Scalar x;
  Scalar y;
};

ParticipantKeys generate_keys(const GroupParams& params, Rng& rng);

// How the data owner folds its message into its share.
struct PlainMessage {};
// Message R*m; R comes from a group key agreement outside this library.
struct BlindedMessage {
  Scalar blinding;
};
// Second message half m2 added to the y exponent.
struct DualMessage {
  Scalar m2;
};
using OwnerVariant = std::variant<PlainMessage, BlindedMessage, DualMessage>;

/// h(x, y) = a^x * b^y, or x*A + y*B on a curve.
GroupElement cvhp(const GroupParams& params, const Scalar& x, const Scalar& y);

GroupElement member_share(const GroupParams& params, const ParticipantKeys& keys);

/// plain:   h(x + m, y)
/// blinded: h(x + R*m, y), R != 0
/// dual:    h(x + m, y + m2)
GroupElement owner_share(const GroupParams& params, const ParticipantKeys& keys, const Scalar& m,
                         const OwnerVariant& variant = PlainMessage{});

/// Product (MODP) or sum (EC) of all shares. Throws on an empty list.
GroupElement combine_shares(const GroupParams& params, std::span<const GroupElement> shares);

/// h(m + sum x_i, sum y_i): the digest the protocol must produce. Test oracle
/// only; no protocol party holds every key.
GroupElement reference_digest(const GroupParams& params, const Scalar& m,
                              std::span<const ParticipantKeys> keys);

/// Given h(k, l) == h(k2, l2) with l != l2, returns d = (k - k2)/(l2 - l)
/// with d*A == B. Requires a prime-order group (EC or MODP subgroup mode).
Scalar collision_to_dlog(const GroupParams& params, const Scalar& k, const Scalar& l,
                         const Scalar& k2, const Scalar& l2);

}  // namespace commhash

#include "commhash/cvhp.hpp"

#include <stdexcept>

namespace commhash {

ParticipantKeys generate_keys(const GroupParams& params, Rng& rng) {
  Scalar x = params.scalar(rng.below(params.order()));
  Scalar y = params.scalar(rng.below(params.order()));
  return {x, y};
}

GroupElement cvhp(const GroupParams& params, const Scalar& x, const Scalar& y) {
  return combine(params, power(params, params.a(), x), power(params, params.b(), y));
}

GroupElement member_share(const GroupParams& params, const ParticipantKeys& keys) {
  return cvhp(params, keys.x, keys.y);
}

GroupElement owner_share(const GroupParams& params, const ParticipantKeys& keys, const Scalar& m,
                         const OwnerVariant& variant) {
  struct Visitor {
    const GroupParams& params;
    const ParticipantKeys& keys;
    const Scalar& m;

    GroupElement operator()(const PlainMessage&) const { return cvhp(params, keys.x + m, keys.y); }
    GroupElement operator()(const BlindedMessage& v) const {
      if (v.blinding.is_zero()) throw std::invalid_argument("zero blinding factor");
      return cvhp(params, keys.x + v.blinding * m, keys.y);
    }
    GroupElement operator()(const DualMessage& v) const {
      return cvhp(params, m + keys.x, v.m2 + keys.y);
    }
  };
  return std::visit(Visitor{params, keys, m}, variant);
}

GroupElement combine_shares(const GroupParams& params, std::span<const GroupElement> shares) {
  if (shares.empty()) throw std::invalid_argument("combine_shares: empty share list");
  GroupElement acc = shares.front();
  for (const auto& share : shares.subspan(1)) acc = combine(params, acc, share);
  return acc;
}

GroupElement reference_digest(const GroupParams& params, const Scalar& m,
                              std::span<const ParticipantKeys> keys) {
  if (keys.empty()) throw std::invalid_argument("reference_digest: no participants");
  Scalar sum_x = m;
  Scalar sum_y = params.scalar(0);
  for (const auto& k : keys) {
    sum_x += k.x;
    sum_y += k.y;
  }
  return cvhp(params, sum_x, sum_y);
}

Scalar collision_to_dlog(const GroupParams& params, const Scalar& k, const Scalar& l,
                         const Scalar& k2, const Scalar& l2) {
  if (params.backend() == Backend::kModp && params.mode() != ModpMode::kSubgroup) {
    throw std::invalid_argument("extraction needs a prime-order group");
  }
  if (!(cvhp(params, k, l) == cvhp(params, k2, l2))) {
    throw std::invalid_argument("inputs are not a collision");
  }
  if (l == l2) throw std::invalid_argument("no extraction: l == l' so k must equal k'");
  return (k - k2) * (l2 - l).inverse();
}

}  // namespace commhash

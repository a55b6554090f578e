#include "commhash/fixtures.hpp"

#include <string>

namespace commhash::fixtures {

GroupParams toy_modp_subgroup() {
  return GroupParams::modp(23, 11, ModpMode::kSubgroup, 2, 3, "fixture");
}

GroupParams toy_modp_primitive() {
  return GroupParams::modp(23, 11, ModpMode::kPrimitive, 5, 7, "fixture");
}

CurveParams toy_curve_params() { return CurveParams{kExplicitCurveId, 17, 2, 2, 19}; }

GroupParams toy_curve() {
  auto base = GroupParams::ec(toy_curve_params(), GroupElement::point(5, 1), GroupElement::point(5, 1));
  Bytes label = to_bytes(kDefaultGeneratorLabel);
  return base.with_b(derive_second_generator(base, label),
                     std::string("hash-to-group:") + kDefaultGeneratorLabel);
}

GroupParams toy_curve_planted(long log_b) {
  auto base = GroupParams::ec(toy_curve_params(), GroupElement::point(5, 1), GroupElement::point(5, 1));
  return base.with_b(power(base, base.a(), base.scalar(log_b)), "planted:" + std::to_string(log_b));
}

}  // namespace commhash::fixtures

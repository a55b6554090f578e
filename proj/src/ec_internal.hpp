#pragma once

#include <optional>
#include <vector>

#include "commhash/group.hpp"

namespace commhash::detail {

// Affine arithmetic on y^2 = x^3 + a x + b over GF(p). Scalar multiplication
// runs in Jacobian coordinates with a 4-bit fixed window and normalizes once.
GroupElement ec_add(const CurveParams& curve, const GroupElement& P, const GroupElement& Q);
GroupElement ec_mul(const CurveParams& curve, const GroupElement& P, const BigInt& k);
bool ec_on_curve(const CurveParams& curve, const GroupElement& P);
BigInt ec_rhs(const CurveParams& curve, const BigInt& x);

// rows[w][d - 1] = d * 16^w * P in affine form, for exponents below 2^bits.
using EcFixedTable = std::vector<std::vector<GroupElement>>;
EcFixedTable ec_fixed_table(const CurveParams& curve, const GroupElement& P, std::size_t bits);
GroupElement ec_mul_fixed(const CurveParams& curve, const EcFixedTable& table, const BigInt& k);

// Square root mod an odd prime p; nullopt for non-residues.
std::optional<BigInt> sqrt_mod(const BigInt& v, const BigInt& p);

}  // namespace commhash::detail

#pragma once

#include "commhash/group.hpp"

// Small named parameter sets for exhaustive testing.
namespace commhash::fixtures {

// p = 23, q = 11, a = 2, b = 3 (both of order 11).
GroupParams toy_modp_subgroup();
// p = 23, q = 11, a = 5, b = 7 (both primitive, order 22).
GroupParams toy_modp_primitive();

// y^2 = x^3 + 2x + 2 over GF(17), 19 points, A = (5, 1), B hash-derived.
CurveParams toy_curve_params();
GroupParams toy_curve();
// Same curve with B = log_b * A, for planted-logarithm tests.
GroupParams toy_curve_planted(long log_b);

}  // namespace commhash::fixtures

#include <vector>
#include <stdexcept>

#include "ec_internal.hpp"

namespace commhash::detail {
namespace {

struct Jacobian {
  BigInt X, Y, Z;  // Z == 0 is the point at infinity
};

class Field {
 public:
  explicit Field(const CurveParams& curve) : p_(curve.p), a_(mod(curve.a, curve.p)) {}

  void reduce(BigInt& v) const { mpz_mod(v.get_mpz_t(), v.get_mpz_t(), p_.get_mpz_t()); }
  BigInt mul(const BigInt& u, const BigInt& v) const {
    BigInt r = u * v;
    reduce(r);
    return r;
  }
  BigInt sqr(const BigInt& u) const { return mul(u, u); }
  BigInt sub(const BigInt& u, const BigInt& v) const {
    BigInt r = u - v;
    if (r < 0) r += p_;
    return r;
  }
  BigInt small(const BigInt& u, unsigned long k) const {
    BigInt r = u * k;
    reduce(r);
    return r;
  }
  const BigInt& a() const { return a_; }
  const BigInt& p() const { return p_; }

 private:
  const BigInt& p_;
  BigInt a_;
};

Jacobian dbl(const Field& f, const Jacobian& P) {
  if (P.Z == 0 || P.Y == 0) return {1, 1, 0};
  BigInt XX = f.sqr(P.X);
  BigInt YY = f.sqr(P.Y);
  BigInt YYYY = f.sqr(YY);
  BigInt S = f.small(f.mul(P.X, YY), 4);
  BigInt M = f.small(XX, 3);
  if (f.a() != 0) {
    BigInt ZZ = f.sqr(P.Z);
    M += f.mul(f.a(), f.sqr(ZZ));
    f.reduce(M);
  }
  Jacobian R;
  R.X = f.sub(f.sqr(M), f.small(S, 2));
  R.Y = f.sub(f.mul(M, f.sub(S, R.X)), f.small(YYYY, 8));
  R.Z = f.small(f.mul(P.Y, P.Z), 2);
  return R;
}

// P + Q with Q affine.
Jacobian add_mixed(const Field& f, const Jacobian& P, const GroupElement& Q) {
  if (Q.is_infinity()) return P;
  if (P.Z == 0) return {Q.x(), Q.y(), 1};
  BigInt Z1Z1 = f.sqr(P.Z);
  BigInt U2 = f.mul(Q.x(), Z1Z1);
  BigInt S2 = f.mul(Q.y(), f.mul(P.Z, Z1Z1));
  BigInt H = f.sub(U2, P.X);
  BigInt r = f.sub(S2, P.Y);
  if (H == 0) {
    if (r == 0) return dbl(f, P);
    return {1, 1, 0};
  }
  BigInt HH = f.sqr(H);
  BigInt HHH = f.mul(H, HH);
  BigInt V = f.mul(P.X, HH);
  Jacobian R;
  R.X = f.sub(f.sub(f.sqr(r), HHH), f.small(V, 2));
  R.Y = f.sub(f.mul(r, f.sub(V, R.X)), f.mul(P.Y, HHH));
  R.Z = f.mul(P.Z, H);
  return R;
}

GroupElement to_affine(const Field& f, const Jacobian& P) {
  if (P.Z == 0) return GroupElement::infinity();
  BigInt zinv = invert(P.Z, f.p());
  BigInt zinv2 = f.sqr(zinv);
  return GroupElement::point(f.mul(P.X, zinv2), f.mul(P.Y, f.mul(zinv2, zinv)));
}

}  // namespace

BigInt ec_rhs(const CurveParams& curve, const BigInt& x) {
  BigInt r = x * x * x + curve.a * x + curve.b;
  return mod(r, curve.p);
}

bool ec_on_curve(const CurveParams& curve, const GroupElement& P) {
  if (P.backend() != Backend::kEc) return false;
  if (P.is_infinity()) return true;
  if (P.x() < 0 || P.x() >= curve.p || P.y() < 0 || P.y() >= curve.p) return false;
  return mod(P.y() * P.y(), curve.p) == ec_rhs(curve, P.x());
}

GroupElement ec_add(const CurveParams& curve, const GroupElement& P, const GroupElement& Q) {
  if (P.is_infinity()) return Q;
  if (Q.is_infinity()) return P;
  const BigInt& p = curve.p;
  BigInt lambda;
  if (P.x() == Q.x()) {
    if (mod(P.y() + Q.y(), p) == 0) return GroupElement::infinity();
    BigInt num = 3 * P.x() * P.x() + curve.a;
    lambda = mod(num * invert(mod(2 * P.y(), p), p), p);
  } else {
    lambda = mod((Q.y() - P.y()) * invert(mod(Q.x() - P.x(), p), p), p);
  }
  BigInt x3 = mod(lambda * lambda - P.x() - Q.x(), p);
  BigInt y3 = mod(lambda * (P.x() - x3) - P.y(), p);
  return GroupElement::point(x3, y3);
}

GroupElement ec_mul(const CurveParams& curve, const GroupElement& P, const BigInt& k) {
  if (k < 0) throw std::invalid_argument("negative scalar");
  if (k == 0 || P.is_infinity()) return GroupElement::infinity();
  Field f(curve);

  // table[i] = i*P for i in [1, 15]
  std::vector<GroupElement> table(16, GroupElement::infinity());
  table[1] = P;
  for (int i = 2; i < 16; ++i) table[i] = ec_add(curve, table[i - 1], P);

  std::size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
  std::size_t windows = (bits + 3) / 4;
  Jacobian acc{1, 1, 0};
  for (std::size_t w = windows; w-- > 0;) {
    for (int d = 0; d < 4; ++d) acc = dbl(f, acc);
    unsigned digit = 0;
    for (int bit = 3; bit >= 0; --bit) {
      digit = digit << 1 | static_cast<unsigned>(mpz_tstbit(k.get_mpz_t(), w * 4 + bit));
    }
    if (digit != 0) acc = add_mixed(f, acc, table[digit]);
  }
  return to_affine(f, acc);
}

EcFixedTable ec_fixed_table(const CurveParams& curve, const GroupElement& P, std::size_t bits) {
  EcFixedTable rows((bits + 3) / 4);
  GroupElement base = P;
  for (auto& row : rows) {
    row.push_back(base);
    for (int d = 2; d < 16; ++d) row.push_back(ec_add(curve, row.back(), base));
    base = ec_add(curve, row.back(), base);
  }
  return rows;
}

GroupElement ec_mul_fixed(const CurveParams& curve, const EcFixedTable& table, const BigInt& k) {
  Field f(curve);
  Jacobian acc{1, 1, 0};
  for (std::size_t w = 0; w < table.size(); ++w) {
    unsigned digit = 0;
    for (int bit = 3; bit >= 0; --bit) {
      digit = digit << 1 | static_cast<unsigned>(mpz_tstbit(k.get_mpz_t(), w * 4 + bit));
    }
    if (digit != 0) acc = add_mixed(f, acc, table[w][digit - 1]);
  }
  return to_affine(f, acc);
}

std::optional<BigInt> sqrt_mod(const BigInt& v, const BigInt& p) {
  BigInt a = mod(v, p);
  if (a == 0) return BigInt(0);
  if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1) return std::nullopt;
  if (mod(p, 4) == 3) return powm(a, (p + 1) / 4, p);

  // Tonelli-Shanks
  BigInt q = p - 1;
  unsigned long s = 0;
  while (mpz_even_p(q.get_mpz_t())) {
    q /= 2;
    ++s;
  }
  BigInt z = 2;
  while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
  BigInt c = powm(z, q, p);
  BigInt r = powm(a, (q + 1) / 2, p);
  BigInt t = powm(a, q, p);
  unsigned long m = s;
  while (t != 1) {
    unsigned long i = 0;
    BigInt t2 = t;
    while (t2 != 1) {
      t2 = mod(t2 * t2, p);
      ++i;
    }
    BigInt b = c;
    for (unsigned long j = 0; j + i + 1 < m; ++j) b = mod(b * b, p);
    r = mod(r * b, p);
    c = mod(b * b, p);
    t = mod(t * c, p);
    m = i;
  }
  return r;
}

}  // namespace commhash::detail

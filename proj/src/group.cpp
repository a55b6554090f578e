#include "commhash/group.hpp"

#include <mutex>
#include <stdexcept>

#include "ec_internal.hpp"

namespace commhash {

namespace detail {

// rows[w][d - 1] = base^(d * 16^w) mod p
using ModpFixedTable = std::vector<std::vector<BigInt>>;

struct FixedBaseCache {
  struct Entry {
    std::once_flag once;
    ModpFixedTable modp;
    EcFixedTable ec;
  };
  Entry a;
  Entry b;
};

}  // namespace detail

namespace {

detail::ModpFixedTable modp_fixed_table(const BigInt& p, const BigInt& base, std::size_t bits) {
  detail::ModpFixedTable rows((bits + 3) / 4);
  BigInt g = base;
  for (auto& row : rows) {
    row.push_back(g);
    for (int d = 2; d < 16; ++d) row.push_back(mod(row.back() * g, p));
    g = mod(row.back() * g, p);
  }
  return rows;
}

BigInt modp_pow_fixed(const BigInt& p, const detail::ModpFixedTable& table, const BigInt& e) {
  BigInt acc = 1;
  for (std::size_t w = 0; w < table.size(); ++w) {
    unsigned digit = 0;
    for (int bit = 3; bit >= 0; --bit) {
      digit = digit << 1 | static_cast<unsigned>(mpz_tstbit(e.get_mpz_t(), w * 4 + bit));
    }
    if (digit == 0) continue;
    mpz_mul(acc.get_mpz_t(), acc.get_mpz_t(), table[w][digit - 1].get_mpz_t());
    mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), p.get_mpz_t());
  }
  return acc;
}

void require_same_modulus(const Scalar& u, const Scalar& v) {
  if (u.modulus() != v.modulus()) throw std::invalid_argument("scalar modulus mismatch");
}

void require_backend(const GroupParams& params, const GroupElement& g) {
  if (g.backend() != params.backend()) throw std::invalid_argument("group backend mismatch");
}

}  // namespace

// Scalar ---------------------------------------------------------------------

Scalar::Scalar(const BigInt& value, std::shared_ptr<const BigInt> modulus)
    : value_(mod(value, *modulus)), modulus_(std::move(modulus)) {}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("inversion of zero scalar");
  return Scalar(invert(value_, *modulus_), modulus_);
}

Scalar operator+(const Scalar& u, const Scalar& v) {
  require_same_modulus(u, v);
  return Scalar(u.value_ + v.value_, u.modulus_);
}

Scalar operator-(const Scalar& u, const Scalar& v) {
  require_same_modulus(u, v);
  return Scalar(u.value_ - v.value_, u.modulus_);
}

Scalar operator*(const Scalar& u, const Scalar& v) {
  require_same_modulus(u, v);
  return Scalar(u.value_ * v.value_, u.modulus_);
}

Scalar operator-(const Scalar& u) { return Scalar(-u.value_, u.modulus_); }

bool operator==(const Scalar& u, const Scalar& v) {
  return u.value_ == v.value_ && u.modulus() == v.modulus();
}

Scalar add(const Scalar& u, const Scalar& v) { return u + v; }
Scalar sub(const Scalar& u, const Scalar& v) { return u - v; }
Scalar mul(const Scalar& u, const Scalar& v) { return u * v; }
Scalar neg(const Scalar& u) { return -u; }
Scalar inv(const Scalar& u) { return u.inverse(); }

// GroupElement ---------------------------------------------------------------

GroupElement GroupElement::residue(BigInt v) {
  return GroupElement(Backend::kModp, std::move(v), BigInt(0), false);
}

GroupElement GroupElement::point(BigInt x, BigInt y) {
  return GroupElement(Backend::kEc, std::move(x), std::move(y), false);
}

GroupElement GroupElement::infinity() { return GroupElement(Backend::kEc, 0, 0, true); }

const BigInt& GroupElement::residue_value() const {
  if (backend_ != Backend::kModp) throw std::logic_error("not a MODP element");
  return x_;
}

const BigInt& GroupElement::x() const {
  if (backend_ != Backend::kEc || infinity_) throw std::logic_error("no affine x coordinate");
  return x_;
}

const BigInt& GroupElement::y() const {
  if (backend_ != Backend::kEc || infinity_) throw std::logic_error("no affine y coordinate");
  return y_;
}

bool operator==(const GroupElement& g, const GroupElement& h) {
  if (g.backend_ != h.backend_ || g.infinity_ != h.infinity_) return false;
  if (g.infinity_) return true;
  return g.x_ == h.x_ && g.y_ == h.y_;
}

// GroupParams ----------------------------------------------------------------

GroupParams GroupParams::modp(BigInt p, BigInt q, ModpMode mode, BigInt a, BigInt b,
                              std::string label) {
  if (mode == ModpMode::kNone) throw std::invalid_argument("MODP params need a mode");
  if (q <= 0) throw std::invalid_argument("exponent modulus must be positive");
  GroupParams out;
  out.backend_ = Backend::kModp;
  out.mode_ = mode;
  out.p_ = std::move(p);
  out.order_ = std::make_shared<const BigInt>(std::move(q));
  out.a_ = GroupElement::residue(std::move(a));
  out.b_ = GroupElement::residue(std::move(b));
  out.label_ = std::move(label);
  out.fixed_ = std::make_shared<detail::FixedBaseCache>();
  return out;
}

GroupParams GroupParams::ec(CurveParams curve, GroupElement base_a, GroupElement base_b,
                            std::string label) {
  if (base_a.backend() != Backend::kEc || base_b.backend() != Backend::kEc) {
    throw std::invalid_argument("EC params need curve points");
  }
  if (curve.n <= 0) throw std::invalid_argument("exponent modulus must be positive");
  GroupParams out;
  out.backend_ = Backend::kEc;
  out.mode_ = ModpMode::kNone;
  out.p_ = curve.p;
  out.order_ = std::make_shared<const BigInt>(curve.n);
  out.curve_ = std::move(curve);
  out.a_ = std::move(base_a);
  out.b_ = std::move(base_b);
  out.label_ = std::move(label);
  out.fixed_ = std::make_shared<detail::FixedBaseCache>();
  return out;
}

GroupElement GroupParams::identity() const {
  return backend_ == Backend::kModp ? GroupElement::residue(1) : GroupElement::infinity();
}

GroupParams GroupParams::with_b(GroupElement b, std::string label) const {
  require_backend(*this, b);
  GroupParams out = *this;
  out.b_ = std::move(b);
  out.label_ = std::move(label);
  out.fixed_ = std::make_shared<detail::FixedBaseCache>();
  return out;
}

bool operator==(const GroupParams& x, const GroupParams& y) {
  if (x.backend_ != y.backend_ || x.mode_ != y.mode_ || x.p_ != y.p_ || x.order() != y.order()) {
    return false;
  }
  if (x.backend_ == Backend::kEc &&
      (x.curve_.id != y.curve_.id || x.curve_.a != y.curve_.a || x.curve_.b != y.curve_.b)) {
    return false;
  }
  return x.a_ == y.a_ && x.b_ == y.b_;
}

// Group law ------------------------------------------------------------------

GroupElement power(const GroupParams& params, const GroupElement& base, const Scalar& e) {
  if (e.modulus() != params.order()) throw std::invalid_argument("scalar from another group");
  return power(params, base, e.value());
}

GroupElement power(const GroupParams& params, const GroupElement& base, const BigInt& e) {
  require_backend(params, base);
  if (e < 0) throw std::invalid_argument("negative exponent");
  detail::FixedBaseCache* cache = params.fixed_base();
  const std::size_t bits = mpz_sizeinbase(params.order().get_mpz_t(), 2);
  if (cache && e != 0 && mpz_sizeinbase(e.get_mpz_t(), 2) <= bits) {
    detail::FixedBaseCache::Entry* entry = nullptr;
    if (base == params.a()) entry = &cache->a;
    else if (base == params.b()) entry = &cache->b;
    if (entry) {
      std::call_once(entry->once, [&] {
        if (params.backend() == Backend::kModp) {
          entry->modp = modp_fixed_table(params.p(), base.residue_value(), bits);
        } else {
          entry->ec = detail::ec_fixed_table(params.curve(), base, bits);
        }
      });
      if (params.backend() == Backend::kModp) {
        return GroupElement::residue(modp_pow_fixed(params.p(), entry->modp, e));
      }
      return detail::ec_mul_fixed(params.curve(), entry->ec, e);
    }
  }
  if (params.backend() == Backend::kModp) {
    return GroupElement::residue(powm(base.residue_value(), e, params.p()));
  }
  return detail::ec_mul(params.curve(), base, e);
}

GroupElement combine(const GroupParams& params, const GroupElement& g, const GroupElement& h) {
  require_backend(params, g);
  require_backend(params, h);
  if (params.backend() == Backend::kModp) {
    return GroupElement::residue(mod(g.residue_value() * h.residue_value(), params.p()));
  }
  return detail::ec_add(params.curve(), g, h);
}

bool is_member(const GroupParams& params, const GroupElement& g) {
  if (g.backend() != params.backend()) return false;
  if (params.backend() == Backend::kEc) return detail::ec_on_curve(params.curve(), g);
  const BigInt& v = g.residue_value();
  if (v < 1 || v >= params.p()) return false;
  if (params.mode() == ModpMode::kSubgroup) {
    return mpz_legendre(v.get_mpz_t(), params.p().get_mpz_t()) == 1;
  }
  return true;
}

// Validation -----------------------------------------------------------------

namespace {

void validate_modp(const GroupParams& params, std::vector<std::string>& out) {
  const BigInt& p = params.p();
  const BigInt& q = params.order();
  if (!is_probable_prime(p)) out.emplace_back("p not prime");
  if (!is_probable_prime(q)) out.emplace_back("q not prime");
  if (p != 2 * q + 1) out.emplace_back("p != 2q+1");
  if (p < 5) return;

  auto check = [&](const GroupElement& g, const char* name) {
    const BigInt& v = g.residue_value();
    if (v <= 1 || v >= p) {
      out.emplace_back(std::string(name) + " out of range");
      return;
    }
    BigInt to_q = powm(v, q, p);
    bool ok = params.mode() == ModpMode::kSubgroup ? to_q == 1 : (to_q == p - 1 && v != p - 1);
    if (!ok) out.emplace_back(std::string(name) + " has wrong order");
  };
  check(params.a(), "a");
  check(params.b(), "b");
  if (params.a() == params.b()) out.emplace_back("a equals b");
}

void validate_ec(const GroupParams& params, std::vector<std::string>& out) {
  const CurveParams& c = params.curve();
  if (!is_probable_prime(c.p)) out.emplace_back("field p not prime");
  if (!is_probable_prime(c.n)) out.emplace_back("group order n not prime");
  if (mod(4 * c.a * c.a * c.a + 27 * c.b * c.b, c.p) == 0) out.emplace_back("curve singular");

  auto check = [&](const GroupElement& g, const char* name) {
    if (g.is_infinity()) {
      out.emplace_back(std::string(name) + " is the identity");
      return;
    }
    if (!detail::ec_on_curve(c, g)) {
      out.emplace_back(std::string(name) + " not on curve");
      return;
    }
    if (!detail::ec_mul(c, g, c.n).is_infinity()) {
      out.emplace_back(std::string(name) + " has wrong order");
    }
  };
  check(params.a(), "A");
  check(params.b(), "B");
  if (params.a() == params.b()) out.emplace_back("A equals B");
}

}  // namespace

std::vector<std::string> validate_group(const GroupParams& params) {
  std::vector<std::string> out;
  if (params.a().backend() != params.backend() || params.b().backend() != params.backend()) {
    out.emplace_back("generator backend mismatch");
    return out;
  }
  if (params.backend() == Backend::kModp) {
    validate_modp(params, out);
  } else {
    validate_ec(params, out);
  }
  return out;
}

}  // namespace commhash

#include "commhash/threshold.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "commhash/cvhp.hpp"
#include "commhash/errors.hpp"
#include "commhash/protocol.hpp"

namespace commhash::threshold {

Polynomial random_polynomial(const GroupParams& params, const Scalar& secret, std::size_t k,
                             Rng& rng) {
  if (k == 0) throw std::invalid_argument("polynomial needs at least one coefficient");
  Polynomial f;
  f.coeffs.reserve(k);
  f.coeffs.push_back(secret);
  for (std::size_t i = 1; i < k; ++i) f.coeffs.push_back(params.scalar(rng.below(params.order())));
  return f;
}

Scalar poly_eval(const Polynomial& f, const Scalar& x) {
  if (f.coeffs.empty()) throw std::invalid_argument("empty polynomial");
  Scalar acc = f.coeffs.back();
  for (auto it = f.coeffs.rbegin() + 1; it != f.coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<Scalar> lagrange_at_zero(std::span<const Scalar> points) {
  if (points.empty()) throw std::invalid_argument("no interpolation points");
  std::vector<Scalar> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].is_zero()) throw std::invalid_argument("interpolation point is zero");
    auto modulus = std::make_shared<const BigInt>(points[i].modulus());
    Scalar num(1, modulus);
    Scalar den(1, modulus);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      Scalar diff = points[j] - points[i];
      if (diff.is_zero()) throw std::invalid_argument("duplicate interpolation point");
      num *= points[j];
      den *= diff;
    }
    out.push_back(num * den.inverse());
  }
  return out;
}

// QuotientTable ----------------------------------------------------------------

void QuotientTable::set(std::uint16_t i, const Scalar& quotient) {
  if (quotient.is_zero()) throw std::invalid_argument("quotient must be nonzero");
  entries_.insert_or_assign(i, quotient);
}

const Scalar* QuotientTable::find(std::uint16_t i) const {
  auto it = entries_.find(i);
  return it == entries_.end() ? nullptr : &it->second;
}

Bytes QuotientTable::encode(const GroupParams& params) const {
  Bytes out;
  for (const auto& [index, q] : entries_) {
    Bytes scalar = commhash::encode(params, q);
    append_u16_be(out, static_cast<std::uint16_t>(2 + scalar.size()));
    append_u16_be(out, index);
    append(out, scalar);
  }
  return out;
}

QuotientTable QuotientTable::decode(const GroupParams& params, ByteSpan data) {
  QuotientTable table;
  ByteReader r(data);
  while (!r.done()) {
    std::uint16_t len = r.u16_be();
    if (len != 2 + params.scalar_width()) throw EncodingError("malformed quotient record");
    std::uint16_t index = r.u16_be();
    Scalar q = decode_scalar(params, r.take(params.scalar_width()));
    if (q.is_zero()) throw EncodingError("zero quotient record");
    if (table.find(index) != nullptr) throw EncodingError("duplicate quotient record");
    table.set(index, q);
  }
  return table;
}

Scalar ratio_from_quotients(const GroupParams& params, const QuotientTable& table, std::uint16_t i,
                            std::uint16_t j) {
  if (i == j) return params.scalar(1);
  if (i > j) return ratio_from_quotients(params, table, j, i).inverse();
  Scalar acc = params.scalar(1);
  for (std::uint16_t k = i; k < j; ++k) {
    const Scalar* q = table.find(k);
    if (q == nullptr) throw std::out_of_range("missing quotient for pair " + std::to_string(k));
    acc *= *q;
  }
  return acc;
}

Scalar lagrange_from_quotients(const GroupParams& params, const QuotientTable& table,
                               std::span<const std::uint16_t> subset, std::uint16_t i) {
  if (std::find(subset.begin(), subset.end(), i) == subset.end()) {
    throw std::invalid_argument("index not in subset");
  }
  const Scalar one = params.scalar(1);
  Scalar acc = one;
  for (std::uint16_t j : subset) {
    if (j == i) continue;
    // x_j / (x_j - x_i) = (1 - x_i/x_j)^{-1}
    Scalar factor = one - ratio_from_quotients(params, table, j, i);
    if (factor.is_zero()) throw std::invalid_argument("duplicate points in subset");
    acc *= factor.inverse();
  }
  return acc;
}

// Multiply ---------------------------------------------------------------------

namespace {

constexpr int kDone = 7;

MultiplySession make_party(MultiplyRole role, const Scalar& blind, std::optional<Scalar> input,
                           int first_step) {
  if (blind.is_zero()) throw std::invalid_argument("blinding factor must be nonzero");
  if (input && input->is_zero()) throw std::invalid_argument("multiply input must be nonzero");
  return MultiplySession{role, blind, std::move(input), first_step, std::nullopt};
}

}  // namespace

MultiplySession multiply_p1(const Scalar& x, const Scalar& r1) {
  return make_party(MultiplyRole::kP1, r1, x, 2);
}

MultiplySession multiply_p2(const Scalar& y, const Scalar& r2) {
  return make_party(MultiplyRole::kP2, r2, y, 2);
}

MultiplySession multiply_server(const Scalar& rs) {
  return make_party(MultiplyRole::kServer, rs, std::nullopt, 3);
}

std::pair<MultiplySession, std::optional<Scalar>> multiply_step(MultiplySession s,
                                                                std::optional<Scalar> incoming) {
  if (s.step == kDone) throw std::logic_error("multiply: session already finished");
  const bool needs_incoming = !(s.role == MultiplyRole::kP1 && s.step == 2);
  if (needs_incoming != incoming.has_value()) throw std::logic_error("multiply: out-of-order message");
  if (incoming && incoming->is_zero()) throw std::invalid_argument("multiply: zero value");

  std::optional<Scalar> out;
  switch (s.role) {
    case MultiplyRole::kP1:
      if (s.step == 2) {
        out = s.blind * *s.input;
        s.step = 4;
      } else {
        out = s.blind.inverse() * *incoming;
        s.step = kDone;
      }
      break;
    case MultiplyRole::kP2:
      if (s.step == 2) {
        out = *incoming * s.blind * *s.input;
        s.step = 5;
      } else {
        out = s.blind.inverse() * *incoming;
        s.step = kDone;
      }
      break;
    case MultiplyRole::kServer:
      if (s.step == 3) {
        out = s.blind * *incoming;
        s.step = 6;
      } else {
        s.output = s.blind.inverse() * *incoming;
        s.step = kDone;
      }
      break;
  }
  return {std::move(s), std::move(out)};
}

MultiplyTranscript run_multiply(const Scalar& x, const Scalar& y, const Scalar& r1,
                                const Scalar& r2, const Scalar& rs) {
  auto p1 = multiply_p1(x, r1);
  auto p2 = multiply_p2(y, r2);
  auto server = multiply_server(rs);
  std::vector<Scalar> messages;

  std::optional<Scalar> msg;
  std::tie(p1, msg) = multiply_step(std::move(p1), std::nullopt);
  messages.push_back(*msg);
  std::tie(p2, msg) = multiply_step(std::move(p2), msg);
  messages.push_back(*msg);
  std::tie(server, msg) = multiply_step(std::move(server), msg);
  messages.push_back(*msg);
  std::tie(p1, msg) = multiply_step(std::move(p1), msg);
  messages.push_back(*msg);
  std::tie(p2, msg) = multiply_step(std::move(p2), msg);
  messages.push_back(*msg);
  std::tie(server, msg) = multiply_step(std::move(server), msg);
  return {std::move(messages), *server.output};
}

MultiplyTranscript run_multiply(const GroupParams& params, const Scalar& x, const Scalar& y,
                                Rng& rng) {
  auto nonzero = [&] { return params.scalar(rng.below(params.order() - 1) + 1); };
  Scalar r1 = nonzero();
  Scalar r2 = nonzero();
  Scalar rs = nonzero();
  return run_multiply(x, y, r1, r2, rs);
}

// Evaluator --------------------------------------------------------------------

SealedSimulationEvaluator::SealedSimulationEvaluator(GroupParams params, Rng rng,
                                                     std::size_t max_degree)
    : params_(std::move(params)), rng_(std::move(rng)), max_degree_(max_degree) {}

const pke::KeyPair& SealedSimulationEvaluator::key_for(std::uint16_t participant) {
  auto it = keys_.find(participant);
  if (it == keys_.end()) it = keys_.emplace(participant, pke::gen(params_, rng_)).first;
  return it->second;
}

SealedValue SealedSimulationEvaluator::seal(std::uint16_t participant, const Scalar& value) {
  const auto& key = key_for(participant);
  return pke::encode(params_, pke::encrypt(params_, key.public_key, encode(params_, value), rng_));
}

Scalar SealedSimulationEvaluator::open(std::uint16_t participant, const SealedValue& sealed) {
  const auto& key = key_for(participant);
  return decode_scalar(params_, pke::decrypt(params_, key.secret, pke::decode(params_, sealed)));
}

SealedValue SealedSimulationEvaluator::evaluate(std::uint16_t participant, const SealedValue& sealed,
                                                const Polynomial& f) {
  if (f.degree() > max_degree_) throw std::invalid_argument("polynomial degree not supported");
  return seal(participant, poly_eval(f, open(participant, sealed)));
}

SealedValue homomorphic_eval(HomomorphicEvaluator& evaluator, std::uint16_t participant,
                             const SealedValue& sealed_x, const Polynomial& f) {
  return evaluator.evaluate(participant, sealed_x, f);
}

// Session ----------------------------------------------------------------------

namespace {

constexpr int kMaxSetupAttempts = 64;

struct Party {
  std::uint16_t index;
  Rng rng;
  std::optional<Scalar> point;  // x_i
  std::optional<Scalar> f_share;
  std::optional<Scalar> g_share;
};

class Wire {
 public:
  explicit Wire(const std::function<void(Frame&)>& tamper) : tamper_(tamper) {}

  Frame deliver(Frame f) const {
    if (tamper_) tamper_(f);
    try {
      return decode_frame(encode_frame(f));
    } catch (const EncodingError& e) {
      throw ProtocolError(ErrorCode::kMalformed, e.what());
    }
  }

 private:
  const std::function<void(Frame&)>& tamper_;
};

Bytes scalar_payload(const GroupParams& params, const Scalar& s) { return encode(params, s); }

Scalar read_scalar(const GroupParams& params, const Frame& f, MsgType expected) {
  if (f.type != expected) throw ProtocolError(ErrorCode::kMalformed, "unexpected frame type");
  try {
    return decode_scalar(params, f.payload);
  } catch (const EncodingError& e) {
    throw ProtocolError(ErrorCode::kMalformed, e.what());
  }
}

Bytes two_blobs(const SealedValue& a, const SealedValue& b) {
  Bytes out;
  append_u16_be(out, static_cast<std::uint16_t>(a.size()));
  append(out, a);
  append_u16_be(out, static_cast<std::uint16_t>(b.size()));
  append(out, b);
  return out;
}

std::pair<SealedValue, SealedValue> read_two_blobs(ByteSpan payload) {
  ByteReader r(payload);
  auto a = r.take(r.u16_be());
  auto b = r.take(r.u16_be());
  r.expect_done();
  return {SealedValue(a.begin(), a.end()), SealedValue(b.begin(), b.end())};
}

std::vector<std::uint16_t> choose_subset(std::size_t k, std::size_t n, std::uint16_t owner,
                                         const std::optional<std::vector<std::uint16_t>>& given,
                                         Rng& rng) {
  if (given) {
    std::set<std::uint16_t> unique(given->begin(), given->end());
    if (given->size() != k || unique.size() != k) {
      throw std::invalid_argument("subset must hold k distinct participants");
    }
    if (*unique.begin() < 1 || *unique.rbegin() > n) throw std::invalid_argument("subset index out of range");
    if (!unique.count(owner)) throw std::invalid_argument("subset must contain the owner");
    return {unique.begin(), unique.end()};
  }
  std::vector<std::uint16_t> others;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i != owner) others.push_back(static_cast<std::uint16_t>(i));
  }
  std::shuffle(others.begin(), others.end(), rng);
  std::vector<std::uint16_t> subset(others.begin(), others.begin() + static_cast<long>(k - 1));
  subset.push_back(owner);
  std::sort(subset.begin(), subset.end());
  return subset;
}

// Prefix products x_j / x_1 collide iff two points coincide.
bool has_duplicate_points(const GroupParams& params, const QuotientTable& table, std::size_t n) {
  std::set<BigInt> seen;
  Scalar acc = params.scalar(1);
  seen.insert(acc.value());
  for (std::uint16_t i = 1; i < n; ++i) {
    acc *= *table.find(i);
    if (!seen.insert(acc.value()).second) return true;
  }
  return false;
}

}  // namespace

ThresholdResult threshold_session(const GroupParams& params, const Scalar& s0, const Scalar& t0,
                                  std::size_t k, std::size_t n, std::uint16_t owner,
                                  const Scalar& m, Rng& rng, const ThresholdOptions& options) {
  if (params.backend() == Backend::kModp && params.mode() != ModpMode::kSubgroup) {
    throw std::invalid_argument("threshold protocol needs a prime-order group (EC or MODP subgroup)");
  }
  if (k < 2 || k > n) throw std::invalid_argument("threshold needs 1 < k <= n");
  if (n > 0xfffe || BigInt(static_cast<unsigned long>(n)) >= params.order()) {
    throw std::invalid_argument("too many participants for the exponent field");
  }
  if (owner < 1 || owner > n) throw std::invalid_argument("owner index out of range");

  std::unique_ptr<HomomorphicEvaluator> own_evaluator;
  HomomorphicEvaluator* evaluator = options.evaluator;
  if (evaluator == nullptr) {
    own_evaluator = std::make_unique<SealedSimulationEvaluator>(params, rng.fork("evaluator"));
    evaluator = own_evaluator.get();
  }
  if (k - 1 > evaluator->max_degree()) throw std::invalid_argument("polynomial degree not supported");

  const Wire wire(options.tamper);
  Rng server_rng = rng.fork("server");
  pke::KeyPair server_key = pke::gen(params, server_rng);
  SessionId setup_id{};
  server_rng.fill(setup_id);

  // 1. dealing polynomials
  Polynomial f = random_polynomial(params, s0, k, server_rng);
  Polynomial g = random_polynomial(params, t0, k, server_rng);

  std::vector<Party> parties;
  parties.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    auto index = static_cast<std::uint16_t>(i);
    parties.push_back(Party{index, rng.fork("participant-" + std::to_string(i)), {}, {}, {}});
  }
  auto nonzero = [&](Rng& r) { return params.scalar(r.below(params.order() - 1) + 1); };

  QuotientTable quotients;
  bool distinct = false;
  for (int attempt = 0; attempt < kMaxSetupAttempts && !distinct; ++attempt) {
    // 2. sealed points out, sealed f(x_i), g(x_i) back
    for (auto& p : parties) {
      p.point = nonzero(p.rng);
      Frame up = wire.deliver(Frame{MsgType::kThresholdSealedPoint, setup_id, p.index,
                                    evaluator->seal(p.index, *p.point)});
      SealedValue fx = homomorphic_eval(*evaluator, up.sender, up.payload, f);
      SealedValue gx = homomorphic_eval(*evaluator, up.sender, up.payload, g);
      Frame down = wire.deliver(
          Frame{MsgType::kThresholdSealedShares, setup_id, kServerIndex, two_blobs(fx, gx)});
      auto [sealed_f, sealed_g] = read_two_blobs(down.payload);
      p.f_share = evaluator->open(p.index, sealed_f);
      p.g_share = evaluator->open(p.index, sealed_g);
    }

    // 3. quotients x_{i+1}/x_i via Multiply(x_i^{-1}, x_{i+1})
    for (std::size_t i = 0; i + 1 < n; ++i) {
      Party& left = parties[i];
      Party& right = parties[i + 1];
      Bytes pair_index;
      append_u16_be(pair_index, left.index);
      wire.deliver(Frame{MsgType::kThresholdQuotientRequest, setup_id, kServerIndex, pair_index});

      auto p1 = multiply_p1(left.point->inverse(), nonzero(left.rng));
      auto p2 = multiply_p2(*right.point, nonzero(right.rng));
      auto srv = multiply_server(nonzero(server_rng));
      std::optional<Scalar> v;

      std::tie(p1, v) = multiply_step(std::move(p1), std::nullopt);
      Frame m1 = wire.deliver(Frame{MsgType::kMultiplyBlindedX, setup_id, left.index,
                                    scalar_payload(params, *v)});
      std::tie(p2, v) = multiply_step(std::move(p2), read_scalar(params, m1, MsgType::kMultiplyBlindedX));
      Frame m2 = wire.deliver(Frame{MsgType::kMultiplyBlindedXY, setup_id, right.index,
                                    scalar_payload(params, *v)});
      std::tie(srv, v) = multiply_step(std::move(srv), read_scalar(params, m2, MsgType::kMultiplyBlindedXY));
      Frame m3 = wire.deliver(Frame{MsgType::kMultiplyServerBlinded, setup_id, kServerIndex,
                                    scalar_payload(params, *v)});
      std::tie(p1, v) = multiply_step(std::move(p1), read_scalar(params, m3, MsgType::kMultiplyServerBlinded));
      Frame m4 = wire.deliver(Frame{MsgType::kMultiplyStripP1, setup_id, left.index,
                                    scalar_payload(params, *v)});
      std::tie(p2, v) = multiply_step(std::move(p2), read_scalar(params, m4, MsgType::kMultiplyStripP1));
      Frame m5 = wire.deliver(Frame{MsgType::kMultiplyStripP2, setup_id, right.index,
                                    scalar_payload(params, *v)});
      std::tie(srv, v) = multiply_step(std::move(srv), read_scalar(params, m5, MsgType::kMultiplyStripP2));
      quotients.set(left.index, *srv.output);
    }
    distinct = !has_duplicate_points(params, quotients, n);
  }
  if (!distinct) throw std::runtime_error("could not draw distinct evaluation points");

  // 4. request, subset, nonces
  Frame request = wire.deliver(Frame{MsgType::kThresholdRequest, {}, owner, {}});
  std::vector<std::uint16_t> subset = choose_subset(k, n, request.sender, options.subset, server_rng);
  auto [session, challenges] = ServerSession::begin(params, subset, server_rng,
                                                    MsgType::kThresholdChallenge,
                                                    MsgType::kThresholdShare);

  // 5. Lagrange coefficients from quotients only
  std::vector<Scalar> lagrange;
  for (std::size_t slot = 0; slot < subset.size(); ++slot) {
    lagrange.push_back(lagrange_from_quotients(params, quotients, subset, subset[slot]));
    append(challenges[slot].frame.payload, encode(params, lagrange.back()));
  }

  // 6-7. shares with nonce echo
  for (auto& out : challenges) {
    Party& p = parties[out.to - 1];
    Frame challenge = wire.deliver(out.frame);
    if (challenge.type != MsgType::kThresholdChallenge ||
        challenge.payload.size() != kNonceSize + params.scalar_width()) {
      throw ProtocolError(ErrorCode::kMalformed, "malformed threshold challenge");
    }
    ByteSpan payload(challenge.payload);
    ByteSpan nonce = payload.first(kNonceSize);
    Scalar ell = decode_scalar(params, payload.subspan(kNonceSize));
    Scalar x_exp = *p.f_share * ell;
    if (p.index == owner) x_exp = m + x_exp;
    GroupElement h = cvhp(params, x_exp, *p.g_share * ell);
    SharePayload share{std::move(h), pke::encrypt(params, server_key.public_key, nonce, p.rng)};
    Frame reply = wire.deliver(Frame{MsgType::kThresholdShare, challenge.session, p.index,
                                     encode_share_payload(params, share)});
    // 8. verify and store
    session.absorb(reply, server_key.secret);
  }
  GroupElement digest = session.finalize();
  wire.deliver(Frame{MsgType::kThresholdResult, session.id(), kServerIndex, encode(params, digest)});
  return ThresholdResult{std::move(digest), std::move(subset), std::move(quotients),
                         std::move(lagrange)};
}

}  // namespace commhash::threshold

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "commhash/frame.hpp"
#include "commhash/group.hpp"
#include "commhash/pke.hpp"
#include "commhash/rng.hpp"

// k-of-n variant: the server deals Shamir shares of (s0, t0) over the
// exponent field, participants receive f(x_i), g(x_i) for secret points x_i
// through a homomorphic evaluator, and the server derives Lagrange
// coefficients from pairwise quotients x_{i+1}/x_i obtained with the blinded
// two-party multiplication protocol. Any k participants then produce
// h(m + s0, t0).
namespace commhash::threshold {

// c_0 + c_1 x + ... + c_{k-1} x^{k-1}; c_0 is the shared secret.
struct Polynomial {
  std::vector<Scalar> coeffs;
  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

Polynomial random_polynomial(const GroupParams& params, const Scalar& secret, std::size_t k,
                             Rng& rng);
Scalar poly_eval(const Polynomial& f, const Scalar& x);

/// Coefficients l_i = prod_{j != i} x_j / (x_j - x_i) so that
/// sum f(x_i) l_i = f(0). Throws std::invalid_argument for zero or repeated
/// points.
std::vector<Scalar> lagrange_at_zero(std::span<const Scalar> points);

// Server-side record of q_i = x_{i+1} / x_i for consecutive participants.
class QuotientTable {
 public:
  void set(std::uint16_t i, const Scalar& quotient);
  const Scalar* find(std::uint16_t i) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::uint16_t, Scalar>& entries() const { return entries_; }

  // Records of u16-BE length | u16-BE index | scalar.
  Bytes encode(const GroupParams& params) const;
  static QuotientTable decode(const GroupParams& params, ByteSpan data);

 private:
  std::map<std::uint16_t, Scalar> entries_;
};

/// x_j / x_i from the chain of stored quotients. Throws std::out_of_range
/// when a needed quotient is missing.
Scalar ratio_from_quotients(const GroupParams& params, const QuotientTable& table, std::uint16_t i,
                            std::uint16_t j);

/// l_i for the subset, as prod_{j != i} (1 - x_i/x_j)^{-1}, using only
/// quotients. Throws std::invalid_argument when two subset points coincide.
Scalar lagrange_from_quotients(const GroupParams& params, const QuotientTable& table,
                               std::span<const std::uint16_t> subset, std::uint16_t i);

// --- Two-party multiplication ------------------------------------------------
//
// P1 holds x, P2 holds y, the server learns x*y:
//   2. P1 -> P2: r1 x;         P2 -> S: r1 x r2 y
//   3. S -> P1:  rS r1 x r2 y
//   4. P1 -> P2: rS x r2 y
//   5. P2 -> S:  rS x y
//   6. S: x y

enum class MultiplyRole { kP1, kP2, kServer };

struct MultiplySession {
  MultiplyRole role;
  Scalar blind;                  // r1, r2 or rS; nonzero
  std::optional<Scalar> input;   // x for P1, y for P2
  int step;                      // next protocol step this party performs
  std::optional<Scalar> output;  // server only, after step 6
};

MultiplySession multiply_p1(const Scalar& x, const Scalar& r1);
MultiplySession multiply_p2(const Scalar& y, const Scalar& r2);
MultiplySession multiply_server(const Scalar& rs);

/// Advances one party by one step. P1's first step takes no incoming value;
/// every other step needs a nonzero one. Throws std::logic_error when called
/// out of order and std::invalid_argument on a zero value.
std::pair<MultiplySession, std::optional<Scalar>> multiply_step(MultiplySession session,
                                                                std::optional<Scalar> incoming);

struct MultiplyTranscript {
  std::vector<Scalar> messages;  // the five inter-party values in order
  Scalar result;                 // what the server ends up with
};

MultiplyTranscript run_multiply(const Scalar& x, const Scalar& y, const Scalar& r1,
                                const Scalar& r2, const Scalar& rs);
MultiplyTranscript run_multiply(const GroupParams& params, const Scalar& x, const Scalar& y,
                                Rng& rng);

// --- Homomorphic evaluation ----------------------------------------------------

using SealedValue = Bytes;

class HomomorphicEvaluator {
 public:
  virtual ~HomomorphicEvaluator() = default;

  virtual std::size_t max_degree() const = 0;
  // Participant side.
  virtual SealedValue seal(std::uint16_t participant, const Scalar& value) = 0;
  virtual Scalar open(std::uint16_t participant, const SealedValue& sealed) = 0;
  // Server side: sealed x -> sealed f(x). Throws std::invalid_argument when
  // the polynomial degree exceeds max_degree().
  virtual SealedValue evaluate(std::uint16_t participant, const SealedValue& sealed,
                               const Polynomial& f) = 0;
};

/// Stand-in for an FHE scheme. Each participant's values are hashed-ElGamal
/// ciphertexts under a key that never leaves this object; evaluate() opens,
/// evaluates and reseals inside it, so callers on the server side only ever
/// hold opaque blobs.
class SealedSimulationEvaluator final : public HomomorphicEvaluator {
 public:
  SealedSimulationEvaluator(GroupParams params, Rng rng, std::size_t max_degree = 64);

  std::size_t max_degree() const override { return max_degree_; }
  SealedValue seal(std::uint16_t participant, const Scalar& value) override;
  Scalar open(std::uint16_t participant, const SealedValue& sealed) override;
  SealedValue evaluate(std::uint16_t participant, const SealedValue& sealed,
                       const Polynomial& f) override;

 private:
  const pke::KeyPair& key_for(std::uint16_t participant);

  GroupParams params_;
  Rng rng_;
  std::size_t max_degree_;
  std::map<std::uint16_t, pke::KeyPair> keys_;
};

SealedValue homomorphic_eval(HomomorphicEvaluator& evaluator, std::uint16_t participant,
                             const SealedValue& sealed_x, const Polynomial& f);

// --- Session -----------------------------------------------------------------

struct ThresholdOptions {
  // Subset Q; drawn by the server (always containing the owner) when absent.
  std::optional<std::vector<std::uint16_t>> subset;
  // Called on every frame before delivery; used to exercise failure paths.
  std::function<void(Frame&)> tamper;
  // Evaluator to use; a SealedSimulationEvaluator is created when null.
  HomomorphicEvaluator* evaluator = nullptr;
};

struct ThresholdResult {
  GroupElement digest;
  std::vector<std::uint16_t> subset;
  QuotientTable quotients;
  std::vector<Scalar> lagrange;  // l_i for the subset, in subset order
};

/// Runs the full k-of-n protocol in process. Requires a prime-order group
/// (EC or MODP subgroup mode), 1 < k <= n, and an owner inside the subset.
/// On a failed nonce echo throws ProtocolError with the same codes as the
/// basic protocol.
ThresholdResult threshold_session(const GroupParams& params, const Scalar& s0, const Scalar& t0,
                                  std::size_t k, std::size_t n, std::uint16_t owner,
                                  const Scalar& m, Rng& rng, const ThresholdOptions& options = {});

}  // namespace commhash::threshold

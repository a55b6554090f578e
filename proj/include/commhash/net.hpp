#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "commhash/cvhp.hpp"
#include "commhash/frame.hpp"
#include "commhash/group.hpp"
#include "commhash/pke.hpp"
#include "commhash/protocol.hpp"
#include "commhash/rng.hpp"

// In-process transport: a seeded scheduler that delivers frames between
// endpoints, FIFO per (sender, receiver) link, with optional fault injection.
namespace commhash::net {

enum class FaultKind { kFlip, kReplaceNonce, kDrop, kDuplicate, kReorder };

std::string to_string(FaultKind kind);

struct Fault {
  std::size_t ordinal;     // index of the frame in send order
  FaultKind kind;
  std::size_t offset = 0;  // byte to flip, kFlip only
};

struct FaultPlan {
  std::vector<Fault> faults;
};

// One frame in flight, as bytes on the wire.
struct Envelope {
  std::uint16_t from;
  std::uint16_t to;
  Bytes wire;
};

// Delivered envelopes in delivery order. `ordinal` is the send-order index.
struct Delivery {
  std::size_t ordinal;
  Envelope envelope;
};
using Trace = std::vector<Delivery>;

class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual std::uint16_t id() const = 0;
  virtual std::vector<Outbound> receive(const Frame& frame) = 0;
  // Bytes from `from` that did not open or parse.
  virtual std::vector<Outbound> reject(std::uint16_t /*from*/) { return {}; }
  // Called once the router has nothing left to deliver.
  virtual std::vector<Outbound> idle() { return {}; }
};

struct RouterOptions {
  std::uint64_t seed = 0;
  FaultPlan plan;
  // Wrap every frame in a pke ciphertext under the receiver's link key, so a
  // flipped byte anywhere fails authentication instead of changing a value.
  bool sealed = false;
  // Needed by kReplaceNonce on SHARE frames.
  std::optional<GroupElement> server_public;
};

class Router {
 public:
  Router(GroupParams params, RouterOptions options);

  void attach(Endpoint& endpoint);
  void post(std::uint16_t from, Outbound out);

  /// Delivers until every queue is empty and no endpoint has more to say on
  /// idle(). Throws std::invalid_argument for an unknown destination.
  const Trace& run();

  const Trace& trace() const { return trace_; }
  std::size_t sent() const { return next_ordinal_; }
  // Faults whose ordinal was never reached.
  std::vector<Fault> unapplied() const;

 private:
  using Link = std::pair<std::uint16_t, std::uint16_t>;
  struct Queued {
    std::size_t ordinal;
    Bytes wire;
  };

  void enqueue(const Link& link, Queued q);
  void deliver(const Link& link, Queued q);
  void post_all(std::uint16_t from, std::vector<Outbound> outs);
  void release_held();
  Bytes seal(std::uint16_t to, const Bytes& plain);
  std::optional<Frame> open(std::uint16_t to, const Bytes& wire);

  GroupParams params_;
  RouterOptions options_;
  Rng rng_;       // scheduling and fault randomness
  Rng seal_rng_;  // link keys and sealing, so sealing leaves the schedule unchanged
  std::map<std::uint16_t, Endpoint*> endpoints_;
  std::map<std::uint16_t, pke::KeyPair> link_keys_;
  std::map<Link, std::deque<Queued>> queues_;
  std::map<Link, std::vector<Queued>> held_;
  std::vector<bool> applied_;
  std::size_t next_ordinal_ = 0;
  Trace trace_;
};

/// Applies `plan` to a recorded list of envelopes (send order). Flip offsets
/// must lie inside the frame and ordinals inside the trace, otherwise
/// std::out_of_range. Replace-nonce re-encrypts random bytes under
/// `server_public` for SHARE frames and randomizes NONCE payloads.
std::vector<Envelope> inject(const FaultPlan& plan, std::vector<Envelope> trace,
                             const GroupParams& params, const GroupElement& server_public,
                             Rng& rng);

// --- Basic protocol endpoints -------------------------------------------------

class ServerEndpoint final : public Endpoint {
 public:
  // With `collect_until_idle`, a complete session is finalized only once the
  // transport goes quiet, so late duplicates still count.
  ServerEndpoint(GroupParams params, pke::KeyPair key, std::uint16_t n, Rng rng,
                 bool collect_until_idle = false);

  std::uint16_t id() const override { return kServerIndex; }
  std::vector<Outbound> receive(const Frame& frame) override;
  std::vector<Outbound> reject(std::uint16_t from) override;
  std::vector<Outbound> idle() override;

  const std::optional<ServerSession>& session() const { return session_; }
  // The stored digest, only after a successful finalize.
  std::optional<GroupElement> stored_digest() const;

 private:
  std::vector<Outbound> settle(bool idle);

  GroupParams params_;
  pke::KeyPair key_;
  std::uint16_t n_;
  Rng rng_;
  std::uint16_t owner_ = 0;
  std::optional<ServerSession> session_;
  bool collect_until_idle_;
  bool reported_ = false;
};

class ParticipantEndpoint final : public Endpoint {
 public:
  ParticipantEndpoint(GroupParams params, std::uint16_t index, ParticipantKeys keys,
                      GroupElement server_public, Rng rng);

  std::uint16_t id() const override { return index_; }
  // Become the data owner for the next session and produce UPLOAD_REQ.
  Outbound upload(const Scalar& m, OwnerVariant variant = PlainMessage{});
  std::vector<Outbound> receive(const Frame& frame) override;

  const std::optional<GroupElement>& result() const { return result_; }
  const std::optional<ErrorCode>& error() const { return error_; }

 private:
  GroupParams params_;
  std::uint16_t index_;
  ParticipantKeys keys_;
  GroupElement server_public_;
  Rng rng_;
  std::optional<OwnerRole> pending_owner_;
  std::optional<SessionId> bound_;
  std::optional<GroupElement> result_;
  std::optional<ErrorCode> error_;
};

// --- One-call harness -----------------------------------------------------------

struct BasicConfig {
  GroupParams params;
  std::vector<ParticipantKeys> keys;  // keys[i] belongs to participant i+1
  std::uint16_t owner = 1;
  Scalar m;
  OwnerVariant variant = PlainMessage{};
  std::uint64_t seed = 0;
  FaultPlan plan;
  bool sealed = false;
};

struct BasicRun {
  std::optional<GroupElement> digest;   // what the server stored
  std::optional<ErrorCode> error;       // why the server failed
  std::optional<GroupElement> owner_result;
  Trace trace;
  std::vector<Fault> unapplied;
};

/// Runs one basic session with n = keys.size() participants over a Router.
BasicRun run_basic_session(const BasicConfig& config);

}  // namespace commhash::net

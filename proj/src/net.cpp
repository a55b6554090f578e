#include "commhash/net.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

#include "commhash/errors.hpp"

namespace commhash::net {

std::string to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::kFlip: return "flip";
    case FaultKind::kReplaceNonce: return "replace-nonce";
    case FaultKind::kDrop: return "drop";
    case FaultKind::kDuplicate: return "duplicate";
    case FaultKind::kReorder: return "reorder";
  }
  return "unknown";
}

namespace {

constexpr std::uint8_t kFlipMask = 0xff;

// Swaps the nonce inside a NONCE or SHARE frame; other frames pass through.
void replace_nonce(Frame& f, const GroupParams& params,
                   const std::optional<GroupElement>& server_public, Rng& rng) {
  if (f.type == MsgType::kNonce || f.type == MsgType::kThresholdChallenge) {
    Bytes fresh = rng.bytes(std::min(f.payload.size(), kNonceSize));
    std::copy(fresh.begin(), fresh.end(), f.payload.begin());
    return;
  }
  if ((f.type != MsgType::kShare && f.type != MsgType::kThresholdShare) || !server_public) return;
  try {
    SharePayload p = decode_share_payload(params, f.payload);
    p.echo = pke::encrypt(params, *server_public, rng.bytes(kNonceSize), rng);
    f.payload = encode_share_payload(params, p);
  } catch (const Error&) {
    // not a well-formed share; nothing to replace
  }
}

std::vector<const Fault*> faults_at(const FaultPlan& plan, std::size_t ordinal) {
  std::vector<const Fault*> out;
  for (const auto& f : plan.faults) {
    if (f.ordinal == ordinal) out.push_back(&f);
  }
  return out;
}

bool has(const std::vector<const Fault*>& fs, FaultKind kind) {
  return std::any_of(fs.begin(), fs.end(), [&](const Fault* f) { return f->kind == kind; });
}

}  // namespace

// Router -------------------------------------------------------------------------

Router::Router(GroupParams params, RouterOptions options)
    : params_(std::move(params)),
      options_(std::move(options)),
      rng_(Rng(options_.seed).fork("router")),
      seal_rng_(Rng(options_.seed).fork("seal")),
      applied_(options_.plan.faults.size(), false) {}

void Router::attach(Endpoint& endpoint) {
  endpoints_[endpoint.id()] = &endpoint;
  if (options_.sealed && !link_keys_.count(endpoint.id())) {
    link_keys_.emplace(endpoint.id(), pke::gen(params_, seal_rng_));
  }
}

Bytes Router::seal(std::uint16_t to, const Bytes& plain) {
  const auto& key = link_keys_.at(to);
  return pke::encode(params_, pke::encrypt(params_, key.public_key, plain, seal_rng_));
}

std::optional<Frame> Router::open(std::uint16_t to, const Bytes& wire) {
  try {
    if (!options_.sealed) return decode_frame(wire);
    Bytes plain = pke::decrypt(params_, link_keys_.at(to).secret, pke::decode(params_, wire));
    return decode_frame(plain);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void Router::post(std::uint16_t from, Outbound out) {
  if (!endpoints_.count(out.to)) {
    throw std::invalid_argument("unknown destination " + std::to_string(out.to));
  }
  const std::size_t ordinal = next_ordinal_++;
  std::vector<const Fault*> fs;
  for (std::size_t i = 0; i < options_.plan.faults.size(); ++i) {
    if (options_.plan.faults[i].ordinal == ordinal) {
      fs.push_back(&options_.plan.faults[i]);
      applied_[i] = true;
    }
  }

  if (has(fs, FaultKind::kReplaceNonce)) replace_nonce(out.frame, params_, options_.server_public, rng_);
  Bytes wire = encode_frame(out.frame);
  if (options_.sealed) wire = seal(out.to, wire);
  for (const Fault* f : fs) {
    if (f->kind == FaultKind::kFlip) wire[f->offset % wire.size()] ^= kFlipMask;
  }
  if (has(fs, FaultKind::kDrop)) return;

  const Link link{from, out.to};
  Queued q{ordinal, std::move(wire)};
  if (has(fs, FaultKind::kReorder)) {
    held_[link].push_back(std::move(q));
    return;
  }
  if (has(fs, FaultKind::kDuplicate)) enqueue(link, q);
  enqueue(link, std::move(q));
}

void Router::enqueue(const Link& link, Queued q) {
  queues_[link].push_back(std::move(q));
  auto it = held_.find(link);
  if (it == held_.end()) return;
  for (auto& h : it->second) queues_[link].push_back(std::move(h));
  held_.erase(it);
}

void Router::release_held() {
  for (auto& [link, frames] : held_) {
    for (auto& h : frames) queues_[link].push_back(std::move(h));
  }
  held_.clear();
}

void Router::post_all(std::uint16_t from, std::vector<Outbound> outs) {
  for (auto& o : outs) post(from, std::move(o));
}

void Router::deliver(const Link& link, Queued q) {
  trace_.push_back({q.ordinal, Envelope{link.first, link.second, q.wire}});
  Endpoint& to = *endpoints_.at(link.second);
  std::optional<Frame> frame = open(link.second, q.wire);
  post_all(link.second, frame ? to.receive(*frame) : to.reject(link.first));
}

const Trace& Router::run() {
  for (;;) {
    std::vector<Link> ready;
    for (const auto& [link, q] : queues_) {
      if (!q.empty()) ready.push_back(link);
    }
    if (ready.empty() && !held_.empty()) {
      release_held();
      continue;
    }
    if (ready.empty()) {
      bool more = false;
      for (auto& [id, ep] : endpoints_) {
        auto outs = ep->idle();
        more = more || !outs.empty();
        post_all(id, std::move(outs));
      }
      if (!more && held_.empty()) break;
      continue;
    }
    const Link link = ready[rng_.below(static_cast<std::uint64_t>(ready.size()))];
    Queued q = std::move(queues_[link].front());
    queues_[link].pop_front();
    deliver(link, std::move(q));
  }
  return trace_;
}

std::vector<Fault> Router::unapplied() const {
  std::vector<Fault> out;
  for (std::size_t i = 0; i < applied_.size(); ++i) {
    if (!applied_[i]) out.push_back(options_.plan.faults[i]);
  }
  return out;
}

// inject -------------------------------------------------------------------------

std::vector<Envelope> inject(const FaultPlan& plan, std::vector<Envelope> trace,
                             const GroupParams& params, const GroupElement& server_public,
                             Rng& rng) {
  for (const auto& f : plan.faults) {
    if (f.ordinal >= trace.size()) {
      throw std::out_of_range("fault ordinal " + std::to_string(f.ordinal) + " beyond trace");
    }
    if (f.kind == FaultKind::kFlip && f.offset >= trace[f.ordinal].wire.size()) {
      throw std::out_of_range("flip offset beyond frame");
    }
  }

  const std::optional<GroupElement> pub = server_public;
  std::vector<Envelope> out;
  std::map<std::pair<std::uint16_t, std::uint16_t>, std::vector<Envelope>> held;
  auto push = [&](Envelope e) {
    auto key = std::make_pair(e.from, e.to);
    out.push_back(std::move(e));
    auto it = held.find(key);
    if (it == held.end()) return;
    for (auto& h : it->second) out.push_back(std::move(h));
    held.erase(it);
  };

  for (std::size_t i = 0; i < trace.size(); ++i) {
    Envelope e = std::move(trace[i]);
    auto fs = faults_at(plan, i);
    if (has(fs, FaultKind::kReplaceNonce)) {
      try {
        Frame f = decode_frame(e.wire);
        replace_nonce(f, params, pub, rng);
        e.wire = encode_frame(f);
      } catch (const EncodingError&) {
        // opaque bytes: leave as is
      }
    }
    for (const Fault* f : fs) {
      if (f->kind == FaultKind::kFlip) e.wire[f->offset] ^= kFlipMask;
    }
    if (has(fs, FaultKind::kDrop)) continue;
    if (has(fs, FaultKind::kReorder)) {
      held[{e.from, e.to}].push_back(std::move(e));
      continue;
    }
    if (has(fs, FaultKind::kDuplicate)) push(e);
    push(std::move(e));
  }
  for (auto& [key, envs] : held) {
    for (auto& h : envs) out.push_back(std::move(h));
  }
  return out;
}

// ServerEndpoint -----------------------------------------------------------------

ServerEndpoint::ServerEndpoint(GroupParams params, pke::KeyPair key, std::uint16_t n, Rng rng,
                               bool collect_until_idle)
    : params_(std::move(params)),
      key_(std::move(key)),
      n_(n),
      rng_(std::move(rng)),
      collect_until_idle_(collect_until_idle) {}

std::vector<Outbound> ServerEndpoint::receive(const Frame& frame) {
  if (frame.type == MsgType::kUploadRequest) {
    // one session per endpoint; repeats are ignored
    if (session_ || frame.sender < 1 || frame.sender > n_) return {};
    owner_ = frame.sender;
    auto [session, nonces] = ServerSession::begin(params_, n_, rng_);
    session_.emplace(std::move(session));
    return nonces;
  }
  if (!session_) return {};
  session_->absorb(frame, key_.secret);
  return settle(false);
}

std::vector<Outbound> ServerEndpoint::reject(std::uint16_t /*from*/) {
  if (!session_) return {};
  session_->abort(ErrorCode::kMalformed);
  return settle(false);
}

std::vector<Outbound> ServerEndpoint::idle() {
  if (!session_ || reported_) return {};
  session_->expire();
  return settle(true);
}

std::vector<Outbound> ServerEndpoint::settle(bool idle) {
  if (reported_) return {};
  std::vector<Outbound> out;
  if (session_->phase() == Phase::kFailed) {
    reported_ = true;
    for (std::uint16_t i : session_->roster()) {
      out.push_back({i, make_error_frame(session_->id(), *session_->error())});
    }
    return out;
  }
  if (session_->complete() && (idle || !collect_until_idle_)) {
    reported_ = true;
    GroupElement digest = session_->finalize();
    out.push_back({owner_, make_result_frame(params_, session_->id(), digest)});
  }
  return out;
}

std::optional<GroupElement> ServerEndpoint::stored_digest() const {
  if (!session_) return std::nullopt;
  return session_->digest();
}

// ParticipantEndpoint ------------------------------------------------------------

ParticipantEndpoint::ParticipantEndpoint(GroupParams params, std::uint16_t index,
                                         ParticipantKeys keys, GroupElement server_public,
                                         Rng rng)
    : params_(std::move(params)),
      index_(index),
      keys_(std::move(keys)),
      server_public_(std::move(server_public)),
      rng_(std::move(rng)) {}

Outbound ParticipantEndpoint::upload(const Scalar& m, OwnerVariant variant) {
  pending_owner_ = OwnerRole{m, std::move(variant)};
  return {kServerIndex, make_upload_request(index_)};
}

std::vector<Outbound> ParticipantEndpoint::receive(const Frame& frame) {
  switch (frame.type) {
    case MsgType::kNonce: {
      if (bound_) return {};
      ParticipantRole role = MemberRole{};
      if (pending_owner_) role = *pending_owner_;
      ParticipantSession session(params_, index_, keys_, std::move(role), server_public_,
                                 frame.session);
      try {
        Frame reply = session.respond(frame, rng_);
        bound_ = frame.session;
        pending_owner_.reset();
        return {{kServerIndex, std::move(reply)}};
      } catch (const ProtocolError&) {
        return {};
      }
    }
    case MsgType::kResult:
      if (bound_ && frame.session == *bound_ && frame.sender == kServerIndex) {
        try {
          result_ = decode_element(params_, frame.payload);
        } catch (const EncodingError&) {
        }
      }
      return {};
    case MsgType::kError:
      if (bound_ && frame.session == *bound_ && frame.sender == kServerIndex) {
        try {
          error_ = error_code_of(frame);
        } catch (const EncodingError&) {
        }
      }
      return {};
    default:
      return {};
  }
}

// Harness ------------------------------------------------------------------------

BasicRun run_basic_session(const BasicConfig& config) {
  const std::size_t n = config.keys.size();
  if (n == 0 || n > 0xfffe) throw std::invalid_argument("participant count out of range");
  if (config.owner < 1 || config.owner > n) throw std::invalid_argument("owner index out of range");

  Rng root(config.seed);
  Rng key_rng = root.fork("server-key");
  pke::KeyPair server_key = pke::gen(config.params, key_rng);

  Router router(config.params,
                RouterOptions{config.seed, config.plan, config.sealed, server_key.public_key});
  ServerEndpoint server(config.params, server_key, static_cast<std::uint16_t>(n),
                        root.fork("server"), true);
  router.attach(server);

  std::vector<std::unique_ptr<ParticipantEndpoint>> parties;
  parties.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto index = static_cast<std::uint16_t>(i + 1);
    parties.push_back(std::make_unique<ParticipantEndpoint>(
        config.params, index, config.keys[i], server_key.public_key,
        root.fork("participant-" + std::to_string(index))));
    router.attach(*parties.back());
  }

  router.post(config.owner, parties[config.owner - 1]->upload(config.m, config.variant));
  router.run();

  BasicRun run;
  run.digest = server.stored_digest();
  if (server.session()) run.error = server.session()->error();
  run.owner_result = parties[config.owner - 1]->result();
  run.trace = router.trace();
  run.unapplied = router.unapplied();
  return run;
}

}  // namespace commhash::net

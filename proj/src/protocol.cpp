#include "commhash/protocol.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "commhash/errors.hpp"
#include "commhash/hash.hpp"

namespace commhash {

Bytes encode_share_payload(const GroupParams& params, const SharePayload& p) {
  Bytes out = encode(params, p.share);
  append(out, pke::encode(params, p.echo));
  return out;
}

SharePayload decode_share_payload(const GroupParams& params, ByteSpan payload) {
  if (payload.empty()) throw EncodingError("malformed share: empty payload");
  std::size_t elem = element_encoding_size(params, payload[0]);
  if (elem > payload.size()) throw EncodingError("malformed share: truncated element");
  GroupElement share = decode_element(params, payload.first(elem));
  return {std::move(share), pke::decode(params, payload.subspan(elem))};
}

Frame make_upload_request(std::uint16_t owner) { return Frame{MsgType::kUploadRequest, {}, owner, {}}; }

Frame make_error_frame(const SessionId& session, ErrorCode code) {
  return Frame{MsgType::kError, session, kServerIndex, Bytes{static_cast<std::uint8_t>(code)}};
}

Frame make_result_frame(const GroupParams& params, const SessionId& session,
                        const GroupElement& digest) {
  return Frame{MsgType::kResult, session, kServerIndex, encode(params, digest)};
}

ErrorCode error_code_of(const Frame& frame) {
  if (frame.type != MsgType::kError || frame.payload.size() != 1 || frame.payload[0] < 1 ||
      frame.payload[0] > 5) {
    throw EncodingError("malformed error frame");
  }
  return static_cast<ErrorCode>(frame.payload[0]);
}

// ServerSession --------------------------------------------------------------

ServerSession::ServerSession(GroupParams params, SessionId id, std::vector<std::uint16_t> roster,
                             std::vector<Nonce> nonces, MsgType share_type)
    : params_(std::move(params)),
      id_(id),
      n_(static_cast<std::uint16_t>(nonces.size())),
      roster_(std::move(roster)),
      share_type_(share_type),
      nonces_(std::move(nonces)),
      shares_(nonces_.size()) {}

std::pair<ServerSession, std::vector<Outbound>> ServerSession::begin(const GroupParams& params,
                                                                     std::uint16_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("session needs at least one participant");
  std::vector<std::uint16_t> roster(n);
  for (std::uint16_t i = 0; i < n; ++i) roster[i] = static_cast<std::uint16_t>(i + 1);
  return begin(params, std::move(roster), rng);
}

std::pair<ServerSession, std::vector<Outbound>> ServerSession::begin(
    const GroupParams& params, std::vector<std::uint16_t> roster, Rng& rng, MsgType nonce_type,
    MsgType share_type) {
  if (roster.empty()) throw std::invalid_argument("session needs at least one participant");
  if (std::set<std::uint16_t>(roster.begin(), roster.end()).size() != roster.size() ||
      std::count(roster.begin(), roster.end(), kServerIndex) != 0) {
    throw std::invalid_argument("roster indices must be distinct and nonzero");
  }
  std::sort(roster.begin(), roster.end());
  const std::size_t n = roster.size();
  SessionId id{};
  rng.fill(id);

  std::vector<Nonce> nonces;
  std::set<Nonce> seen;
  while (nonces.size() < n) {
    Nonce r{};
    rng.fill(r);
    if (seen.insert(r).second) nonces.push_back(r);
  }

  std::vector<Outbound> out;
  out.reserve(n);
  for (std::size_t slot = 0; slot < n; ++slot) {
    const Nonce& r = nonces[slot];
    out.push_back({roster[slot], Frame{nonce_type, id, kServerIndex, Bytes(r.begin(), r.end())}});
  }
  return {ServerSession(params, id, std::move(roster), std::move(nonces), share_type),
          std::move(out)};
}

void ServerSession::fail(ErrorCode code) {
  phase_ = Phase::kFailed;
  error_ = code;
  std::fill(shares_.begin(), shares_.end(), std::nullopt);
}

void ServerSession::absorb(const Frame& frame, const Scalar& server_secret) {
  if (phase_ == Phase::kDone || phase_ == Phase::kFailed) return;
  if (frame.type != share_type_ || frame.session != id_) return fail(ErrorCode::kMalformed);
  auto it = std::lower_bound(roster_.begin(), roster_.end(), frame.sender);
  if (it == roster_.end() || *it != frame.sender) return fail(ErrorCode::kMalformed);

  std::size_t slot = static_cast<std::size_t>(it - roster_.begin());
  if (shares_[slot].has_value()) return fail(ErrorCode::kDuplicate);

  std::optional<SharePayload> payload;
  try {
    payload = decode_share_payload(params_, frame.payload);
  } catch (const EncodingError&) {
    return fail(ErrorCode::kMalformed);
  }

  Bytes echoed;
  try {
    echoed = pke::decrypt(params_, server_secret, payload->echo);
  } catch (const Error&) {
    return fail(ErrorCode::kDecryptFail);
  }
  if (!equal_ct(echoed, nonces_[slot])) return fail(ErrorCode::kNonceMismatch);

  shares_[slot] = std::move(payload->share);
  ++received_;
  phase_ = Phase::kCollecting;
}

GroupElement ServerSession::finalize() {
  if (phase_ == Phase::kFailed) throw ProtocolError(*error_, "session failed: " + to_string(*error_));
  if (phase_ == Phase::kDone) return *digest_;
  if (!complete()) {
    fail(ErrorCode::kMissing);
    throw ProtocolError(ErrorCode::kMissing, "session has outstanding shares");
  }
  std::vector<GroupElement> shares;
  shares.reserve(n_);
  for (auto& s : shares_) shares.push_back(std::move(*s));
  digest_ = combine_shares(params_, shares);
  std::fill(shares_.begin(), shares_.end(), std::nullopt);
  phase_ = Phase::kDone;
  return *digest_;
}

void ServerSession::expire() {
  if (phase_ == Phase::kDone || phase_ == Phase::kFailed) return;
  if (!complete()) fail(ErrorCode::kMissing);
}

void ServerSession::abort(ErrorCode code) {
  if (phase_ == Phase::kDone || phase_ == Phase::kFailed) return;
  fail(code);
}

// ParticipantSession ---------------------------------------------------------

ParticipantSession::ParticipantSession(GroupParams params, std::uint16_t index,
                                       ParticipantKeys keys, ParticipantRole role,
                                       GroupElement server_public, SessionId session)
    : params_(std::move(params)),
      index_(index),
      keys_(std::move(keys)),
      role_(std::move(role)),
      server_public_(std::move(server_public)),
      session_(session) {
  if (index_ == kServerIndex) throw std::invalid_argument("participant index must be >= 1");
}

Frame ParticipantSession::respond(const Frame& nonce_frame, Rng& rng) const {
  if (nonce_frame.type != MsgType::kNonce) {
    throw ProtocolError(ErrorCode::kMalformed, "expected a NONCE frame");
  }
  if (nonce_frame.session != session_) {
    throw ProtocolError(ErrorCode::kMalformed, "NONCE frame for another session");
  }
  if (nonce_frame.sender != kServerIndex) {
    throw ProtocolError(ErrorCode::kMalformed, "NONCE frame not from the server");
  }
  if (nonce_frame.payload.size() != kNonceSize) {
    throw ProtocolError(ErrorCode::kMalformed, "NONCE payload has wrong length");
  }

  GroupElement share = std::visit(
      [&](const auto& role) {
        using Role = std::decay_t<decltype(role)>;
        if constexpr (std::is_same_v<Role, OwnerRole>) {
          return owner_share(params_, keys_, role.m, role.variant);
        } else {
          return member_share(params_, keys_);
        }
      },
      role_);
  SharePayload payload{std::move(share),
                       pke::encrypt(params_, server_public_, nonce_frame.payload, rng)};
  return Frame{MsgType::kShare, session_, index_, encode_share_payload(params_, payload)};
}

}  // namespace commhash

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "commhash/cvhp.hpp"
#include "commhash/frame.hpp"
#include "commhash/group.hpp"
#include "commhash/pke.hpp"
#include "commhash/rng.hpp"

// The n-party commutative hashing protocol:
//   1. on an upload request S sends a fresh nonce r_i to every P_i
//   2. the owner answers h(x_1 + m, y_1) | Enc_S(r_1)
//   3. every other member answers h(x_i, y_i) | Enc_S(r_i)
//   4. S checks each echoed nonce and stores the combined shares
namespace commhash {

inline constexpr std::size_t kNonceSize = 32;
using Nonce = std::array<std::uint8_t, kNonceSize>;

enum class Phase { kIssued, kCollecting, kDone, kFailed };

// SHARE payload: encode(h_i) | pke ciphertext of the nonce.
struct SharePayload {
  GroupElement share;
  pke::Ciphertext echo;
};
Bytes encode_share_payload(const GroupParams& params, const SharePayload& p);
SharePayload decode_share_payload(const GroupParams& params, ByteSpan payload);

Frame make_upload_request(std::uint16_t owner);
Frame make_error_frame(const SessionId& session, ErrorCode code);
Frame make_result_frame(const GroupParams& params, const SessionId& session,
                        const GroupElement& digest);
// Parses an ERROR payload.
ErrorCode error_code_of(const Frame& frame);

class ServerSession {
 public:
  /// Issues n distinct nonces under a fresh session id. Participants are
  /// indexed 1..n; the returned frames are addressed accordingly.
  static std::pair<ServerSession, std::vector<Outbound>> begin(const GroupParams& params,
                                                               std::uint16_t n, Rng& rng);

  /// Same, for an arbitrary roster of distinct participant indices and
  /// caller-chosen frame types (the threshold protocol reuses this). Frames
  /// come back in ascending roster order.
  static std::pair<ServerSession, std::vector<Outbound>> begin(
      const GroupParams& params, std::vector<std::uint16_t> roster, Rng& rng,
      MsgType nonce_type = MsgType::kNonce, MsgType share_type = MsgType::kShare);

  /// Verifies the echoed nonce and records the share. Any problem moves the
  /// session to kFailed with a code; nothing is thrown for bad input. Frames
  /// arriving after the session failed or finished are ignored.
  void absorb(const Frame& frame, const Scalar& server_secret);

  /// Combines the n recorded shares and discards them. Throws ProtocolError
  /// (kMissing) if shares are outstanding, or with the failure code if the
  /// session already failed.
  GroupElement finalize();

  /// Deadline reached: fails with kMissing unless every share arrived.
  void expire();

  /// Fails the session from outside, e.g. when the transport delivers bytes
  /// that do not parse. No effect once done or failed.
  void abort(ErrorCode code);

  bool complete() const { return received_ == n_; }
  Phase phase() const { return phase_; }
  std::optional<ErrorCode> error() const { return error_; }
  const std::optional<GroupElement>& digest() const { return digest_; }
  const SessionId& id() const { return id_; }
  std::uint16_t participants() const { return n_; }
  std::size_t received() const { return received_; }
  const std::vector<std::uint16_t>& roster() const { return roster_; }

 private:
  ServerSession(GroupParams params, SessionId id, std::vector<std::uint16_t> roster,
                std::vector<Nonce> nonces, MsgType share_type);
  void fail(ErrorCode code);

  GroupParams params_;
  SessionId id_;
  std::uint16_t n_;
  std::vector<std::uint16_t> roster_;
  MsgType share_type_;
  std::vector<Nonce> nonces_;
  std::vector<std::optional<GroupElement>> shares_;
  std::size_t received_ = 0;
  Phase phase_ = Phase::kIssued;
  std::optional<ErrorCode> error_;
  std::optional<GroupElement> digest_;
};

struct MemberRole {};
struct OwnerRole {
  Scalar m;
  OwnerVariant variant = PlainMessage{};
};
using ParticipantRole = std::variant<MemberRole, OwnerRole>;

class ParticipantSession {
 public:
  ParticipantSession(GroupParams params, std::uint16_t index, ParticipantKeys keys,
                     ParticipantRole role, GroupElement server_public, SessionId session);

  /// Answers a NONCE frame with a SHARE frame. Throws ProtocolError
  /// (kMalformed) for a frame from another session, another sender than the
  /// server, or a bad payload.
  Frame respond(const Frame& nonce_frame, Rng& rng) const;

  std::uint16_t index() const { return index_; }
  bool is_owner() const { return std::holds_alternative<OwnerRole>(role_); }
  const SessionId& session() const { return session_; }

 private:
  GroupParams params_;
  std::uint16_t index_;
  ParticipantKeys keys_;
  ParticipantRole role_;
  GroupElement server_public_;
  SessionId session_;
};

}  // namespace commhash

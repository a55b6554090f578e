#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "commhash/bytes.hpp"
#include "commhash/errors.hpp"

namespace commhash {

// Wire frame:
//   "XCH1" | type u8 | session id (16) | sender u16-BE | payload len u32-BE | payload
enum class MsgType : std::uint8_t {
  kUploadRequest = 0x01,
  kNonce = 0x02,
  kShare = 0x03,
  kResult = 0x04,
  kError = 0x05,

  kThresholdSealedPoint = 0x10,    // P_i -> S: sealed x_i
  kThresholdSealedShares = 0x11,   // S -> P_i: sealed f(x_i), g(x_i)
  kThresholdQuotientRequest = 0x12,  // S -> P_i, P_i+1: run Multiply for pair i
  kThresholdRequest = 0x13,        // owner -> S
  kThresholdChallenge = 0x14,      // S -> P_i: nonce | l_i
  kThresholdShare = 0x15,          // P_i -> S: h_i | Enc(r_i)
  kThresholdResult = 0x16,         // S -> owner: digest

  kMultiplyBlindedX = 0x20,        // P1 -> P2: r1 x
  kMultiplyBlindedXY = 0x21,       // P2 -> S:  r1 x r2 y
  kMultiplyServerBlinded = 0x22,   // S -> P1:  rS r1 x r2 y
  kMultiplyStripP1 = 0x23,         // P1 -> P2: rS x r2 y
  kMultiplyStripP2 = 0x24,         // P2 -> S:  rS x y
  kMultiplyOutput = 0x25,          // S -> quotient store: x y
};

enum class ErrorCode : std::uint8_t {
  kNonceMismatch = 1,
  kDuplicate = 2,
  kDecryptFail = 3,
  kMissing = 4,
  kMalformed = 5,
};

std::string to_string(ErrorCode code);
bool is_known_type(std::uint8_t type);

using SessionId = std::array<std::uint8_t, 16>;

inline constexpr std::uint16_t kServerIndex = 0;
inline constexpr std::array<std::uint8_t, 4> kFrameMagic = {'X', 'C', 'H', '1'};
inline constexpr std::size_t kFrameHeaderSize = 4 + 1 + 16 + 2 + 4;

struct Frame {
  MsgType type;
  SessionId session{};
  std::uint16_t sender = 0;
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

// A frame plus its destination party.
struct Outbound {
  std::uint16_t to;
  Frame frame;
};

Bytes encode_frame(const Frame& frame);
// Throws EncodingError on bad magic, unknown type or length mismatch.
Frame decode_frame(ByteSpan data);

class ProtocolError : public Error {
 public:
  ProtocolError(ErrorCode code, const std::string& what) : Error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace commhash

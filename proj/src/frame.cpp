#include "commhash/frame.hpp"

#include <algorithm>

namespace commhash {

std::string to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonceMismatch: return "NONCE_MISMATCH";
    case ErrorCode::kDuplicate: return "DUPLICATE";
    case ErrorCode::kDecryptFail: return "DECRYPT_FAIL";
    case ErrorCode::kMissing: return "MISSING";
    case ErrorCode::kMalformed: return "MALFORMED";
  }
  return "UNKNOWN(" + std::to_string(static_cast<int>(code)) + ")";
}

bool is_known_type(std::uint8_t type) {
  return (type >= 0x01 && type <= 0x05) || (type >= 0x10 && type <= 0x16) ||
         (type >= 0x20 && type <= 0x25);
}

Bytes encode_frame(const Frame& frame) {
  Bytes out(kFrameMagic.begin(), kFrameMagic.end());
  out.reserve(kFrameHeaderSize + frame.payload.size());
  out.push_back(static_cast<std::uint8_t>(frame.type));
  append(out, frame.session);
  append_u16_be(out, frame.sender);
  append_u32_be(out, static_cast<std::uint32_t>(frame.payload.size()));
  append(out, frame.payload);
  return out;
}

Frame decode_frame(ByteSpan data) {
  ByteReader r(data);
  auto magic = r.take(kFrameMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kFrameMagic.begin())) {
    throw EncodingError("malformed frame: bad magic");
  }
  std::uint8_t type = r.u8();
  if (!is_known_type(type)) throw EncodingError("malformed frame: unknown type");
  Frame f{static_cast<MsgType>(type), {}, 0, {}};
  auto sid = r.take(f.session.size());
  std::copy(sid.begin(), sid.end(), f.session.begin());
  f.sender = r.u16_be();
  std::uint32_t len = r.u32_be();
  if (len != r.remaining()) throw EncodingError("malformed frame: payload length mismatch");
  auto payload = r.rest();
  f.payload.assign(payload.begin(), payload.end());
  return f;
}

}  // namespace commhash

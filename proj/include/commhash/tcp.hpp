#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "commhash/errors.hpp"
#include "commhash/frame.hpp"
#include "commhash/group.hpp"
#include "commhash/net.hpp"
#include "commhash/pke.hpp"
#include "commhash/rng.hpp"

// Loopback TCP transport. Each record on the stream is u32-BE length | body.
// After connecting, both sides send one handshake record
//   params digest (32) | party id u16-BE | encode(link public key)
// and every later record is one frame sealed with pke under the peer's link
// key.
namespace commhash::tcp {

inline constexpr std::size_t kMaxRecord = 1 << 20;

class HandshakeError : public Error {
 public:
  using Error::Error;
};

class ConnectionClosed : public Error {
 public:
  using Error::Error;
};

class Connection {
 public:
  explicit Connection(int fd) : fd_(fd) {}
  Connection(Connection&& other) noexcept;
  Connection& operator=(Connection&& other) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;
  ~Connection();

  static Connection connect(const std::string& host, std::uint16_t port);

  void send_record(ByteSpan body);
  // Throws ConnectionClosed at end of stream, Error for an oversized record.
  Bytes recv_record();
  // Wakes any blocked reader and ends both directions.
  void shutdown();

 private:
  int fd_ = -1;
};

class Listener {
 public:
  // Binds 127.0.0.1; port 0 picks a free one.
  explicit Listener(std::uint16_t port = 0);
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  std::uint16_t port() const { return port_; }
  Connection accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

class SecureLink {
 public:
  /// Exchanges handshakes; throws HandshakeError when the peer runs other
  /// group parameters or sends a malformed handshake.
  static SecureLink establish(Connection conn, const GroupParams& params, std::uint16_t self,
                              Rng& rng);

  void send(const Frame& frame);
  // Throws AuthenticationError or EncodingError for a bad record.
  Frame recv();

  std::uint16_t peer() const { return peer_; }
  void shutdown() { conn_.shutdown(); }

 private:
  SecureLink(Connection conn, GroupParams params, pke::KeyPair own, GroupElement peer_public,
             std::uint16_t peer, Rng rng);

  Connection conn_;
  GroupParams params_;
  pke::KeyPair own_;
  GroupElement peer_public_;
  std::uint16_t peer_;
  Rng rng_;
};

/// Drives a server endpoint over one link per participant until it has
/// reported a result or an error. Links are read concurrently; the endpoint
/// itself only runs on the calling thread.
void serve(net::Endpoint& server, std::vector<SecureLink>& links);

/// Drives a participant endpoint over its link to the server until a RESULT
/// or ERROR frame arrives or the server closes the link.
void participate(net::Endpoint& participant, SecureLink& link, std::vector<Outbound> initial = {});

}  // namespace commhash::tcp

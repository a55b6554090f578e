#include "commhash/tcp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <optional>
#include <thread>

#include "commhash/hash.hpp"

namespace commhash::tcp {

namespace {

[[noreturn]] void sys_fail(const char* what) {
  throw Error(std::string(what) + ": " + std::strerror(errno));
}

void write_all(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) throw ConnectionClosed("peer closed the link");
      sys_fail("send");
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

void read_all(int fd, std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    ssize_t r = ::recv(fd, data, n, 0);
    if (r == 0) throw ConnectionClosed("peer closed the link");
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == ECONNRESET || errno == EBADF || errno == ENOTCONN) {
        throw ConnectionClosed("link reset");
      }
      sys_fail("recv");
    }
    data += r;
    n -= static_cast<std::size_t>(r);
  }
}

sockaddr_in loopback(std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  return addr;
}

}  // namespace

// Connection ---------------------------------------------------------------------

Connection::Connection(Connection&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Connection& Connection::operator=(Connection&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

Connection::~Connection() {
  if (fd_ >= 0) ::close(fd_);
}

Connection Connection::connect(const std::string& host, std::uint16_t port) {
  sockaddr_in addr = loopback(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw std::invalid_argument("not an IPv4 address: " + host);
  }
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  Connection conn(fd);
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) sys_fail("connect");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return conn;
}

void Connection::send_record(ByteSpan body) {
  if (body.size() > kMaxRecord) throw Error("record too large");
  Bytes rec;
  rec.reserve(4 + body.size());
  append_u32_be(rec, static_cast<std::uint32_t>(body.size()));
  append(rec, body);
  write_all(fd_, rec.data(), rec.size());
}

Bytes Connection::recv_record() {
  std::uint8_t len_be[4];
  read_all(fd_, len_be, sizeof len_be);
  ByteReader r(ByteSpan(len_be, sizeof len_be));
  std::uint32_t len = r.u32_be();
  if (len > kMaxRecord) throw Error("record too large");
  Bytes body(len);
  read_all(fd_, body.data(), body.size());
  return body;
}

void Connection::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

// Listener -----------------------------------------------------------------------

Listener::Listener(std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = loopback(port);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd_);
    sys_fail("bind");
  }
  if (::listen(fd_, 64) != 0) {
    ::close(fd_);
    sys_fail("listen");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Connection Listener::accept() {
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Connection(fd);
    }
    if (errno != EINTR) sys_fail("accept");
  }
}

// SecureLink ---------------------------------------------------------------------

SecureLink::SecureLink(Connection conn, GroupParams params, pke::KeyPair own,
                       GroupElement peer_public, std::uint16_t peer, Rng rng)
    : conn_(std::move(conn)),
      params_(std::move(params)),
      own_(std::move(own)),
      peer_public_(std::move(peer_public)),
      peer_(peer),
      rng_(std::move(rng)) {}

SecureLink SecureLink::establish(Connection conn, const GroupParams& params, std::uint16_t self,
                                 Rng& rng) {
  pke::KeyPair own = pke::gen(params, rng);
  const Sha256Digest digest = params_digest(params);

  Bytes hello(digest.begin(), digest.end());
  append_u16_be(hello, self);
  append(hello, encode(params, own.public_key));
  conn.send_record(hello);

  Bytes peer_hello = conn.recv_record();
  try {
    ByteReader r(peer_hello);
    ByteSpan peer_digest = r.take(digest.size());
    if (!equal_ct(peer_digest, digest)) throw HandshakeError("peer uses different group parameters");
    std::uint16_t peer = r.u16_be();
    GroupElement peer_public = decode_element(params, r.rest());
    if (peer_public == params.identity()) throw HandshakeError("peer link key is the identity");
    return SecureLink(std::move(conn), params, std::move(own), std::move(peer_public), peer,
                      rng.fork("link"));
  } catch (const EncodingError& e) {
    throw HandshakeError(std::string("malformed handshake: ") + e.what());
  }
}

void SecureLink::send(const Frame& frame) {
  pke::Ciphertext ct = pke::encrypt(params_, peer_public_, encode_frame(frame), rng_);
  conn_.send_record(pke::encode(params_, ct));
}

Frame SecureLink::recv() {
  Bytes record = conn_.recv_record();
  Bytes plain = pke::decrypt(params_, own_.secret, pke::decode(params_, record));
  return decode_frame(plain);
}

// Drivers ------------------------------------------------------------------------

namespace {

struct Inbound {
  std::uint16_t from;
  std::optional<Frame> frame;  // empty: the record did not open
};

bool is_final(const Frame& f) { return f.type == MsgType::kResult || f.type == MsgType::kError; }

}  // namespace

void serve(net::Endpoint& server, std::vector<SecureLink>& links) {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Inbound> inbox;
  std::size_t open_readers = links.size();

  std::vector<std::thread> readers;
  readers.reserve(links.size());
  for (auto& link : links) {
    readers.emplace_back([&, l = &link] {
      for (;;) {
        Inbound in{l->peer(), std::nullopt};
        try {
          in.frame = l->recv();
        } catch (const ConnectionClosed&) {
          break;
        } catch (const Error&) {
        }
        std::lock_guard lock(mu);
        inbox.push_back(std::move(in));
        cv.notify_one();
      }
      std::lock_guard lock(mu);
      --open_readers;
      cv.notify_one();
    });
  }

  auto send_all = [&](const std::vector<Outbound>& outs) {
    bool finished = false;
    for (const auto& o : outs) {
      for (auto& link : links) {
        if (link.peer() != o.to) continue;
        try {
          link.send(o.frame);
        } catch (const ConnectionClosed&) {
        }
      }
      finished = finished || is_final(o.frame);
    }
    return finished;
  };

  bool finished = false;
  while (!finished) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return !inbox.empty() || open_readers == 0; });
    if (inbox.empty()) {
      lock.unlock();
      send_all(server.idle());
      break;
    }
    Inbound in = std::move(inbox.front());
    inbox.pop_front();
    lock.unlock();
    finished = send_all(in.frame ? server.receive(*in.frame) : server.reject(in.from));
  }

  for (auto& link : links) link.shutdown();
  for (auto& t : readers) t.join();
}

void participate(net::Endpoint& participant, SecureLink& link, std::vector<Outbound> initial) {
  for (const auto& o : initial) link.send(o.frame);
  for (;;) {
    std::vector<Outbound> outs;
    bool final_frame = false;
    try {
      Frame f = link.recv();
      final_frame = is_final(f);
      outs = participant.receive(f);
    } catch (const ConnectionClosed&) {
      return;
    } catch (const Error&) {
      outs = participant.reject(link.peer());
    }
    try {
      for (const auto& o : outs) link.send(o.frame);
    } catch (const ConnectionClosed&) {
      return;
    }
    if (final_frame) return;
  }
}

}  // namespace commhash::tcp

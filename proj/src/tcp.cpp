#include "skre/tcp.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "skre/errors.hpp"

namespace skre::net {

Bytes frame(const Envelope& e) {
  const Bytes body = e.encode();
  if (body.size() > kMaxFrameBytes) throw WireError("frame exceeds the 64 MiB cap");
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(body.size()));
  w.raw(body);
  return w.take();
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Bytes> FrameReader::next() {
  if (buffered() < 4) return std::nullopt;
  const std::uint8_t* p = buf_.data() + pos_;
  const std::size_t len = (std::size_t{p[0]} << 24) | (std::size_t{p[1]} << 16) | (std::size_t{p[2]} << 8) | p[3];
  if (len > kMaxFrameBytes) throw WireError("incoming frame exceeds the 64 MiB cap");
  if (buffered() < 4 + len) return std::nullopt;
  Bytes out(p + 4, p + 4 + len);
  pos_ += 4 + len;
  if (pos_ > (1u << 20) && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  return out;
}

Address Address::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ConfigError("address must be host:port");
  Address a;
  if (colon > 0) a.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  try {
    const unsigned long v = std::stoul(port);
    if (v > 65535) throw std::out_of_range("port");
    a.port = static_cast<std::uint16_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid port in address '" + text + "'");
  }
  return a;
}

namespace {

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Socket() { close(); }

  int fd() const { return fd_; }
  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  void shutdown_both() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_ = -1;
};

void send_all(int fd, std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t k = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw ProtocolAbort(std::string("send failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(k);
  }
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

addrinfo* resolve(const Address& a, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(a.port);
  const int rc = ::getaddrinfo(a.host.empty() ? nullptr : a.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) throw std::runtime_error("cannot resolve " + a.str() + ": " + ::gai_strerror(rc));
  return res;
}

// Events produced by per-connection reader threads, consumed by the routing loop.
struct Event {
  std::size_t conn = 0;
  std::optional<Bytes> frame;  // nullopt: connection closed
  std::string error;
};

class EventQueue {
 public:
  void push(Event e) {
    {
      std::lock_guard lock(mu_);
      q_.push_back(std::move(e));
    }
    cv_.notify_one();
  }
  std::optional<Event> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, timeout, [&] { return !q_.empty(); })) return std::nullopt;
    Event e = std::move(q_.front());
    q_.pop_front();
    return e;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Event> q_;
};

void reader_loop(int fd, std::size_t conn, EventQueue& q) {
  FrameReader reader;
  std::vector<std::uint8_t> buf(1 << 16);
  try {
    for (;;) {
      const ssize_t k = ::recv(fd, buf.data(), buf.size(), 0);
      if (k < 0 && errno == EINTR) continue;
      if (k <= 0) break;
      reader.feed(std::span(buf.data(), static_cast<std::size_t>(k)));
      while (auto f = reader.next()) q.push({conn, std::move(f), {}});
    }
    q.push({conn, std::nullopt, {}});
  } catch (const std::exception& ex) {
    q.push({conn, std::nullopt, ex.what()});
  }
}

}  // namespace

Transcript run_tcp_server(const Router& router, Endpoint& server, TcpServerOptions options) {
  const std::uint32_t n = router.n();
  Socket listener;
  {
    addrinfo* res = resolve(options.bind, true);
    std::string err = "no usable address";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
      if (s.fd() < 0) continue;
      int one = 1;
      ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(s.fd(), static_cast<int>(n) + 8) == 0) {
        listener = std::move(s);
        break;
      }
      err = std::strerror(errno);
    }
    ::freeaddrinfo(res);
    if (listener.fd() < 0) throw std::runtime_error("cannot listen on " + options.bind.str() + ": " + err);
  }
  sockaddr_storage bound{};
  socklen_t bound_len = sizeof bound;
  ::getsockname(listener.fd(), reinterpret_cast<sockaddr*>(&bound), &bound_len);
  const std::uint16_t port = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                                                : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  if (options.on_listening) options.on_listening(port);

  std::vector<Socket> conns;
  EventQueue events;
  std::vector<std::thread> readers;
  const auto deadline = std::chrono::steady_clock::now() + options.timeout;
  while (conns.size() < n) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      for (auto& c : conns) c.shutdown_both();
      for (auto& t : readers) t.join();
      throw ProtocolAbort("fewer than n clients connected before the deadline");
    }
    pollfd pfd{listener.fd(), POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (pr <= 0) continue;
    Socket c(::accept(listener.fd(), nullptr, nullptr));
    if (c.fd() < 0) continue;
    set_nodelay(c.fd());
    const std::size_t index = conns.size();
    readers.emplace_back(reader_loop, c.fd(), index, std::ref(events));
    conns.push_back(std::move(c));
  }

  Transcript transcript;
  std::map<PartyId, std::size_t> conn_of;      // client id -> connection
  std::map<std::size_t, PartyId> id_of;        // connection -> client id
  std::vector<bool> open(conns.size(), true);

  auto write_to = [&](PartyId id, const Envelope& e) {
    const auto it = conn_of.find(id);
    if (it == conn_of.end() || !open[it->second]) return false;
    try {
      send_all(conns[it->second].fd(), frame(e));
    } catch (const ProtocolAbort&) {
      return false;
    }
    return true;
  };
  auto emit = [&](std::vector<Envelope> out) {
    for (auto& e : out) {
      if (write_to(e.receiver, e)) transcript.record(e, false);
    }
  };

  auto finish = [&] {
    for (auto& c : conns) c.shutdown_both();
    for (auto& t : readers) t.join();
  };

  try {
    while (!server.finished()) {
      auto ev = events.pop(options.timeout);
      if (!ev) throw ProtocolAbort("session timed out");
      const std::size_t conn = ev->conn;
      if (!ev->frame) {
        if (!open[conn]) continue;
        open[conn] = false;
        if (id_of.count(conn)) emit(server.on_peer_lost(id_of[conn]));
        continue;
      }
      Envelope e;
      try {
        e = Envelope::decode(*ev->frame);
      } catch (const WireError&) {
        continue;  // undecodable frames are dropped; the header names no one to answer
      }
      const auto known = id_of.find(conn);
      if (known == id_of.end()) {
        if (e.sender < 1 || e.sender > n || conn_of.count(e.sender)) {
          send_all(conns[conn].fd(), frame(router.error_reply(e, "unknown or duplicate client id")));
          continue;
        }
        id_of[conn] = e.sender;
        conn_of[e.sender] = conn;
      } else if (known->second != e.sender) {
        send_all(conns[conn].fd(), frame(router.error_reply(e, "sender id does not match the connection")));
        continue;
      }
      const Route r = router.route(e);
      switch (r.kind) {
        case Route::Kind::ToServer:
          transcript.record(e, false);
          emit(server.on_envelope(e));
          break;
        case Route::Kind::Relay:
          if (write_to(r.target, e)) transcript.record(e, true);
          break;
        case Route::Kind::ToClient:
        case Route::Kind::Reject:
          write_to(e.sender, r.kind == Route::Kind::Reject ? r.reply : router.error_reply(e, "clients cannot send as the server"));
          break;
      }
    }
  } catch (...) {
    finish();
    throw;
  }
  finish();
  return transcript;
}

void run_tcp_client(Endpoint& client, const TcpClientOptions& options) {
  Socket s;
  const auto deadline = std::chrono::steady_clock::now() + options.connect_timeout;
  std::string err;
  while (s.fd() < 0) {
    addrinfo* res = resolve(options.server, false);
    for (addrinfo* ai = res; ai && s.fd() < 0; ai = ai->ai_next) {
      Socket c(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
      if (c.fd() < 0) continue;
      if (::connect(c.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
        s = std::move(c);
      } else {
        err = std::strerror(errno);
      }
    }
    ::freeaddrinfo(res);
    if (s.fd() >= 0) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      throw std::runtime_error("cannot connect to " + options.server.str() + ": " + err);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  set_nodelay(s.fd());

  auto send_out = [&](const std::vector<Envelope>& out) {
    for (const auto& e : out) send_all(s.fd(), frame(e));
  };
  send_out(client.start());
  FrameReader reader;
  std::vector<std::uint8_t> buf(1 << 16);
  while (!client.finished()) {
    while (auto f = reader.next()) {
      send_out(client.on_envelope(Envelope::decode(*f)));
      if (client.finished()) return;
    }
    pollfd pfd{s.fd(), POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(options.timeout.count()));
    if (pr == 0) throw ProtocolAbort("session timed out");
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw ProtocolAbort(std::string("poll failed: ") + std::strerror(errno));
    }
    const ssize_t k = ::recv(s.fd(), buf.data(), buf.size(), 0);
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) throw ProtocolAbort("server closed the connection");
    reader.feed(std::span(buf.data(), static_cast<std::size_t>(k)));
  }
}

}  // namespace skre::net

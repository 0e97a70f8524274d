#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "skre/router.hpp"

namespace skre::net {

inline constexpr std::size_t kMaxFrameBytes = std::size_t{64} << 20;

// Frame = u32 big-endian length | encoded envelope.
Bytes frame(const Envelope& e);

// Reassembles frames from arbitrary stream fragments.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  // Next complete frame body; throws WireError for frames above the cap.
  std::optional<Bytes> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  Bytes buf_;
  std::size_t pos_ = 0;
};

struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7450;

  // "host:port" or ":port".
  static Address parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

struct TcpServerOptions {
  Address bind;
  std::chrono::milliseconds timeout{60'000};  // idle limit while the session runs
  std::function<void(std::uint16_t)> on_listening;  // actual port (useful with port 0)
};

// Accepts n clients and drives the session until the server endpoint finishes.
// Returns the transcript of every envelope routed through the server.
Transcript run_tcp_server(const Router& router, Endpoint& server, TcpServerOptions options);

struct TcpClientOptions {
  Address server;
  std::chrono::milliseconds connect_timeout{5'000};
  std::chrono::milliseconds timeout{60'000};
};

// Runs one client endpoint to completion. Throws std::runtime_error on connection failure
// and ProtocolAbort when the server goes away or the session idles past the timeout.
void run_tcp_client(Endpoint& client, const TcpClientOptions& options);

}  // namespace skre::net

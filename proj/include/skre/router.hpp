#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skre/envelope.hpp"
#include "skre/hash.hpp"

namespace skre::net {

// Payload kind reserved for router error replies.
inline constexpr std::uint8_t kRouterErrorKind = 0xEE;

// A party driven by messages: start() yields its opening messages, on_envelope() its
// replies. Endpoints never block and never talk to the transport directly.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual std::vector<Envelope> start() = 0;
  virtual std::vector<Envelope> on_envelope(const Envelope& e) = 0;
  // Server side only: a client connection went away.
  virtual std::vector<Envelope> on_peer_lost(PartyId) { return {}; }
  virtual bool finished() const = 0;
};

struct Route {
  enum class Kind { ToServer, ToClient, Relay, Reject };
  Kind kind = Kind::Reject;
  PartyId target = 0;
  Envelope reply;  // set for Reject: error envelope addressed to the sender
};

// Star routing: client payloads for the server go to its state machine, client-to-client
// payloads are forwarded verbatim after a header check only.
class Router {
 public:
  Router(ProtocolId protocol, std::uint64_t session, std::uint32_t n) : protocol_(protocol), session_(session), n_(n) {}

  Route route(const Envelope& e) const;
  Envelope error_reply(const Envelope& offending, const std::string& reason) const;

  std::uint32_t n() const { return n_; }
  std::uint64_t session() const { return session_; }
  ProtocolId protocol() const { return protocol_; }

 private:
  ProtocolId protocol_;
  std::uint64_t session_;
  std::uint32_t n_;
};

struct TranscriptEntry {
  Bytes encoded;
  PartyId sender = 0;
  PartyId receiver = 0;
  std::uint16_t round = 0;
  bool relayed = false;  // client-to-client, forwarded by the server
};

// Every envelope that crossed the router, in delivery order. The hash is taken over the
// sorted encodings so that it does not depend on the interleaving of independent senders.
class Transcript {
 public:
  void record(const Envelope& e, bool relayed);
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  Digest hash() const;
  std::string hash_hex() const;

 private:
  std::vector<TranscriptEntry> entries_;
};

}  // namespace skre::net

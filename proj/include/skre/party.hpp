#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skre/aheg.hpp"
#include "skre/core.hpp"
#include "skre/envelope.hpp"
#include "skre/parallel.hpp"
#include "skre/prng.hpp"
#include "skre/router.hpp"
#include "skre/she.hpp"
#include "skre/wire.hpp"

namespace skre::proto {

using core::PartyId;
using net::Envelope;

struct SessionParams {
  net::ProtocolId protocol = net::ProtocolId::Ygc;
  core::ProtocolConfig config;
  std::uint64_t session_id = 0;
  // Seeded party randomness (reproducible transcripts). When false, parties draw from the OS.
  bool deterministic = true;
  Exec exec = Exec::Parallel;
};

// Validates the config for the protocol (SHE needs t = n) and fills in the session id.
SessionParams make_params(net::ProtocolId protocol, const core::ProtocolConfig& config, bool deterministic = true);
std::uint64_t derive_session_id(net::ProtocolId protocol, const core::ProtocolConfig& config);

struct PeerInfo {
  PartyId id = 0;
  aheg::Point pk;  // personal key
  aheg::Point dh;  // Diffie-Hellman public value
  bool live = true;
};

// Indexed by id - 1.
using Directory = std::vector<PeerInfo>;

// Test-mode trusted dealer: threshold key shares are installed out of band and never
// travel in an envelope.
struct DealerOutput {
  std::optional<aheg::ThresholdKey> ahe;
  std::optional<she::SheKeyMaterial> she;
};
DealerOutput run_dealer(const SessionParams& params);

// What the server may know: public keys and the public evaluation context.
struct ServerKeys {
  aheg::Point common_pk;
  std::shared_ptr<const she::SlotBackend> she_context;
};
ServerKeys server_keys(const DealerOutput& dealer);

struct ClientKeys {
  aheg::AheKeyPair personal;
  aheg::AheKeyPair dh;
  aheg::Point common_pk;
  std::optional<aheg::KeyShare> threshold_share;
  std::optional<she::SheKeyShare> she_share;
  std::shared_ptr<const she::SlotBackend> she_context;
};

// ---- Protocol state machines ----

class ClientProtocol {
 public:
  ClientProtocol(const SessionParams& params, PartyId self, ClientKeys keys, std::uint64_t input, Prng rng);
  virtual ~ClientProtocol() = default;

  // Round-1 messages, once the directory is known.
  virtual std::vector<Envelope> begin() = 0;
  virtual std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) = 0;

  void set_directory(Directory d) { dir_ = std::move(d); }
  PartyId self() const { return self_; }
  const ClientKeys& keys() const { return keys_; }
  std::optional<std::uint64_t> output() const { return output_; }

 protected:
  Envelope to_server(std::uint16_t round, Bytes payload) const;
  Envelope to_peer(PartyId peer, std::uint16_t round, Bytes payload) const;
  const PeerInfo& peer(PartyId id) const;
  // Bounded decode of the final ciphertext's point; sets the output.
  void finish(const aheg::Point& q);

  SessionParams params_;
  PartyId self_;
  ClientKeys keys_;
  core::DistinctInput x_;
  core::BitVector bits_;
  Prng rng_;
  Directory dir_;
  std::optional<std::uint64_t> output_;
};

class ServerProtocol {
 public:
  ServerProtocol(const SessionParams& params, ServerKeys keys, Prng rng);
  virtual ~ServerProtocol() = default;

  virtual std::vector<Envelope> begin() = 0;
  virtual std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) = 0;
  // Default: any loss aborts.
  virtual std::vector<Envelope> peer_lost(PartyId id);

  void set_directory(Directory d);
  bool done() const { return done_; }
  std::uint16_t round() const { return round_; }
  const std::vector<PartyId>& roster() const { return roster_; }

 protected:
  Envelope to_client(PartyId id, std::uint16_t round, Bytes payload);
  const PeerInfo& peer(PartyId id) const;
  bool in_roster(PartyId id) const;
  // 1-based position of a roster member.
  std::uint32_t position(PartyId id) const;
  std::uint32_t live() const { return static_cast<std::uint32_t>(roster_.size()); }
  // Drops a client that has not sent its first message; ThresholdFailure if the session
  // can no longer complete.
  void shrink_roster(PartyId id);

  SessionParams params_;
  ServerKeys keys_;
  Prng rng_;
  Directory dir_;
  std::vector<PartyId> roster_;
  std::uint16_t round_ = 0;
  bool done_ = false;
};

std::unique_ptr<ClientProtocol> make_client_protocol(const SessionParams& params, PartyId self, ClientKeys keys,
                                                     std::uint64_t input, Prng rng);
std::unique_ptr<ServerProtocol> make_server_protocol(const SessionParams& params, ServerKeys keys, Prng rng);

// ---- Endpoints: registration and directory, then delegation ----

class ClientSession final : public net::Endpoint {
 public:
  ClientSession(const SessionParams& params, PartyId self, std::uint64_t input, const DealerOutput& dealer);

  std::vector<Envelope> start() override;
  std::vector<Envelope> on_envelope(const Envelope& e) override;
  bool finished() const override { return output().has_value() || failed_; }

  PartyId id() const { return self_; }
  std::optional<std::uint64_t> output() const { return protocol_->output(); }
  bool failed() const { return failed_; }
  const std::string& error() const { return error_; }
  const ClientProtocol& protocol() const { return *protocol_; }

 private:
  SessionParams params_;
  PartyId self_;
  std::unique_ptr<ClientProtocol> protocol_;
  bool have_directory_ = false;
  bool failed_ = false;
  std::string error_;
};

class ServerSession final : public net::Endpoint {
 public:
  enum class Status { Registering, Running, Done, Aborted };

  ServerSession(const SessionParams& params, const DealerOutput& dealer);

  std::vector<Envelope> start() override { return {}; }
  std::vector<Envelope> on_envelope(const Envelope& e) override;
  std::vector<Envelope> on_peer_lost(PartyId id) override;
  bool finished() const override { return status_ == Status::Done || status_ == Status::Aborted; }

  Status status() const { return status_; }
  const std::string& abort_reason() const { return reason_; }
  std::uint16_t rounds() const { return protocol_->round(); }
  const std::vector<PartyId>& roster() const { return protocol_->roster(); }
  const ServerProtocol& protocol() const { return *protocol_; }

 private:
  std::vector<Envelope> abort(const std::string& reason);
  std::vector<Envelope> guarded(const std::function<std::vector<Envelope>()>& step);

  SessionParams params_;
  std::unique_ptr<ServerProtocol> protocol_;
  Directory dir_;
  std::set<PartyId> registered_;
  std::set<PartyId> lost_;
  Status status_ = Status::Registering;
  std::string reason_;
};

Bytes abort_payload(const std::string& reason);

}  // namespace skre::proto

#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <vector>

#include "skre/prng.hpp"
#include "skre/router.hpp"

namespace skre::net {

struct LoopbackOptions {
  std::uint64_t schedule_seed = 0;
  // These clients crash as soon as the server sends them anything (i.e. after setup,
  // before their first protocol message).
  std::set<PartyId> crash_after_setup;
  std::uint64_t max_deliveries = 100'000'000;
};

// In-process star network. Each client has an uplink and a downlink FIFO; a seeded
// scheduler picks which non-empty channel delivers next, fuzzing the interleaving
// across senders while preserving per-sender order.
class LoopbackNetwork {
 public:
  LoopbackNetwork(const Router& router, Endpoint& server, std::vector<Endpoint*> clients, LoopbackOptions options);

  void run();
  const Transcript& transcript() const { return transcript_; }
  bool crashed(PartyId id) const { return crashed_.count(id) != 0; }
  std::uint64_t deliveries() const { return deliveries_; }

 private:
  struct Queued {
    Envelope env;
    bool relayed = false;
  };
  void push_from_server(std::vector<Envelope> out);
  void push_from_client(PartyId id, std::vector<Envelope> out);
  void deliver_uplink(PartyId id);
  void deliver_downlink(PartyId id);

  const Router& router_;
  Endpoint& server_;
  std::vector<Endpoint*> clients_;
  LoopbackOptions options_;
  Prng scheduler_;
  std::vector<std::deque<Queued>> up_;
  std::vector<std::deque<Queued>> down_;
  std::set<PartyId> crashed_;
  Transcript transcript_;
  std::uint64_t deliveries_ = 0;
};

}  // namespace skre::net

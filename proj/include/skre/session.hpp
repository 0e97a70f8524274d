#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skre/loopback.hpp"
#include "skre/party.hpp"

namespace skre::proto {

struct SimulationResult {
  SessionParams params;
  std::vector<std::optional<std::uint64_t>> outputs;  // by client id - 1
  std::vector<std::string> client_errors;
  bool aborted = false;
  std::string abort_reason;
  std::uint16_t server_rounds = 0;
  std::vector<PartyId> roster;  // clients that took part after setup
  net::Transcript transcript;
  // Per-client inspection of the combiner step (AHE-L: recovered rank; AHE-D: decoded or not).
  std::vector<std::optional<std::uint32_t>> combiner_ranks;
  std::vector<std::optional<bool>> combiner_decoded;
  double wall_ms = 0;

  bool ok() const;  // finished, every roster client holds an output
};

// All parties in one process over the loopback network.
SimulationResult run_simulation(const SessionParams& params, std::span<const std::uint64_t> inputs,
                                const net::LoopbackOptions& options = {});

// Gathers outputs and server state after a run on any transport.
SimulationResult summarize(const SessionParams& params, const ServerSession& server,
                           const std::vector<std::unique_ptr<ClientSession>>& clients, net::Transcript transcript,
                           double wall_ms);

// Inspection hooks for tests.
std::optional<std::uint32_t> lin_combiner_rank(const ClientProtocol& p);
std::optional<bool> dgk_combiner_decoded(const ClientProtocol& p);

}  // namespace skre::proto

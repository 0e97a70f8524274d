#include "skre/session.hpp"

#include <chrono>

#include "protocols.hpp"
#include "skre/messages.hpp"

namespace skre::proto {

void expect_sender(const Envelope& e, PartyId expected) {
  if (e.sender != expected) {
    throw WireError("message " + std::string(kind_name(wire::payload_kind(e.payload))) + " from party " +
                    std::to_string(e.sender) + ", expected " + std::to_string(expected));
  }
}

std::unique_ptr<ClientProtocol> make_client_protocol(const SessionParams& params, PartyId self, ClientKeys keys,
                                                     std::uint64_t input, Prng rng) {
  switch (params.protocol) {
    case net::ProtocolId::Ygc: return make_ygc_client(params, self, std::move(keys), input, std::move(rng));
    case net::ProtocolId::AheLin: return make_lin_client(params, self, std::move(keys), input, std::move(rng));
    case net::ProtocolId::AheDgk: return make_dgk_client(params, self, std::move(keys), input, std::move(rng));
    case net::ProtocolId::She: return make_she_client(params, self, std::move(keys), input, std::move(rng));
  }
  throw ConfigError("unknown protocol");
}

std::unique_ptr<ServerProtocol> make_server_protocol(const SessionParams& params, ServerKeys keys, Prng rng) {
  switch (params.protocol) {
    case net::ProtocolId::Ygc: return make_ygc_server(params, std::move(keys), std::move(rng));
    case net::ProtocolId::AheLin: return make_lin_server(params, std::move(keys), std::move(rng));
    case net::ProtocolId::AheDgk: return make_dgk_server(params, std::move(keys), std::move(rng));
    case net::ProtocolId::She: return make_she_server(params, std::move(keys), std::move(rng));
  }
  throw ConfigError("unknown protocol");
}

bool SimulationResult::ok() const {
  if (aborted) return false;
  for (PartyId id : roster) {
    if (!outputs[id - 1]) return false;
  }
  return !roster.empty();
}

SimulationResult run_simulation(const SessionParams& params, std::span<const std::uint64_t> inputs,
                                const net::LoopbackOptions& options) {
  const auto& c = params.config;
  if (inputs.size() != c.n) throw ConfigError("expected " + std::to_string(c.n) + " inputs, got " + std::to_string(inputs.size()));
  const auto t0 = std::chrono::steady_clock::now();

  const DealerOutput dealer = run_dealer(params);
  ServerSession server(params, dealer);
  std::vector<std::unique_ptr<ClientSession>> clients;
  std::vector<net::Endpoint*> endpoints;
  for (PartyId id = 1; id <= c.n; ++id) {
    clients.push_back(std::make_unique<ClientSession>(params, id, inputs[id - 1], dealer));
    endpoints.push_back(clients.back().get());
  }
  const net::Router router(params.protocol, params.session_id, c.n);
  net::LoopbackNetwork network(router, server, endpoints, options);
  network.run();

  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return summarize(params, server, clients, network.transcript(), ms);
}

SimulationResult summarize(const SessionParams& params, const ServerSession& server,
                           const std::vector<std::unique_ptr<ClientSession>>& clients, net::Transcript transcript,
                           double wall_ms) {
  SimulationResult res;
  res.params = params;
  res.transcript = std::move(transcript);
  res.server_rounds = server.rounds();
  res.aborted = server.status() != ServerSession::Status::Done;
  res.abort_reason = server.status() == ServerSession::Status::Aborted ? server.abort_reason()
                     : res.aborted                                      ? "session stalled"
                                                                        : "";
  if (server.status() != ServerSession::Status::Registering) res.roster = server.roster();
  for (const auto& cl : clients) {
    res.outputs.push_back(cl->output());
    res.client_errors.push_back(cl->error());
    res.combiner_ranks.push_back(lin_combiner_rank(cl->protocol()));
    res.combiner_decoded.push_back(dgk_combiner_decoded(cl->protocol()));
  }
  res.wall_ms = wall_ms;
  return res;
}

}  // namespace skre::proto

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skre/router.hpp"
#include "skre/session.hpp"
#include "skre/wire.hpp"

namespace skre::proto {

inline constexpr int kMetricsSchemaVersion = 1;

// Byte counters cover every envelope (header included). Item counts cover protocol
// rounds only (round >= 1), so key registration is excluded. A relayed envelope counts
// as sent by its origin and again as sent by the server.
struct PartyTraffic {
  PartyId id = 0;  // 0 = server
  std::uint64_t bytes_up = 0;    // sent
  std::uint64_t bytes_down = 0;  // received
  std::uint64_t messages_up = 0;
  std::uint64_t messages_down = 0;
  wire::ItemTally items;  // sent in protocol rounds
};

std::vector<PartyTraffic> traffic(const net::Transcript& t, std::uint32_t n);

// Largest round stamp on any protocol message.
unsigned transcript_rounds(const net::Transcript& t);
// Distinct protocol message kinds delivered to clients (server-sent or relayed).
unsigned transcript_flights(const net::Transcript& t);

struct RunMetrics {
  std::string protocol;
  std::uint32_t n = 0, k = 0, t = 0;
  unsigned mu = 0, mu_prime = 0;
  unsigned rounds = 0;
  unsigned flights = 0;
  std::string transcript_hash;
  std::vector<PartyTraffic> parties;  // server first, then clients 1..n
  std::optional<std::uint64_t> result;
  bool aborted = false;
  std::string abort_reason;
  double wall_time_ms = 0;
};

RunMetrics collect_metrics(const SimulationResult& r);
RunMetrics collect_metrics(const SessionParams& p, const net::Transcript& t);

// Pretty JSON; wall time omitted when include_wall_time is false.
std::string metrics_json(const RunMetrics& m, bool include_wall_time = true);

// One benchmark measurement: wall time, bits sent (client = max over clients) and item
// counts.
struct BenchRow {
  std::string protocol;
  std::uint32_t n = 0, k = 0, t = 0;
  unsigned mu = 0;
  unsigned rounds = 0;
  double time_ms = 0;
  std::uint64_t client_bits = 0;
  std::uint64_t server_bits = 0;
  wire::ItemTally client_items;  // fieldwise max over clients
  wire::ItemTally server_items;
  bool ok = false;
};

const std::string& bench_csv_header();
std::string bench_csv_line(const BenchRow& row);
BenchRow bench_protocol(const SessionParams& params, std::span<const std::uint64_t> inputs);

}  // namespace skre::proto

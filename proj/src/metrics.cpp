#include "skre/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "skre/messages.hpp"

namespace skre::proto {

std::vector<PartyTraffic> traffic(const net::Transcript& t, std::uint32_t n) {
  std::vector<PartyTraffic> out(n + 1);
  for (std::uint32_t i = 0; i <= n; ++i) out[i].id = i;
  for (const auto& e : t.entries()) {
    const std::uint64_t size = e.encoded.size();
    const auto env = net::Envelope::decode(e.encoded);
    const bool counted = e.round >= 1 && !is_control_kind(wire::payload_kind(env.payload));
    const wire::ItemTally items = counted ? wire::tally(env.payload) : wire::ItemTally{};
    auto sent = [&](PartyId id) {
      out[id].bytes_up += size;
      out[id].messages_up += 1;
      out[id].items += items;
    };
    auto received = [&](PartyId id) {
      out[id].bytes_down += size;
      out[id].messages_down += 1;
    };
    sent(e.sender);
    if (e.relayed) {
      received(net::kServerId);
      sent(net::kServerId);
    }
    received(e.receiver);
  }
  return out;
}

unsigned transcript_rounds(const net::Transcript& t) {
  unsigned r = 0;
  for (const auto& e : t.entries()) r = std::max<unsigned>(r, e.round);
  return r;
}

unsigned transcript_flights(const net::Transcript& t) {
  std::set<std::uint8_t> kinds;
  for (const auto& e : t.entries()) {
    if (e.receiver == net::kServerId || e.round == 0) continue;
    const auto env = net::Envelope::decode(e.encoded);
    const std::uint8_t kind = wire::payload_kind(env.payload);
    if (!is_control_kind(kind)) kinds.insert(kind);
  }
  return static_cast<unsigned>(kinds.size());
}

RunMetrics collect_metrics(const SessionParams& p, const net::Transcript& t) {
  RunMetrics m;
  m.protocol = std::string(net::protocol_name(p.protocol));
  m.n = p.config.n;
  m.k = p.config.k;
  m.t = p.config.t;
  m.mu = p.config.mu;
  m.mu_prime = p.config.mu_prime();
  m.rounds = transcript_rounds(t);
  m.flights = transcript_flights(t);
  m.transcript_hash = t.hash_hex();
  m.parties = traffic(t, p.config.n);
  return m;
}

RunMetrics collect_metrics(const SimulationResult& r) {
  RunMetrics m = collect_metrics(r.params, r.transcript);
  for (PartyId id : r.roster) {
    if (r.outputs[id - 1]) {
      m.result = r.outputs[id - 1];
      break;
    }
  }
  m.aborted = r.aborted;
  m.abort_reason = r.abort_reason;
  m.wall_time_ms = r.wall_ms;
  return m;
}

std::string metrics_json(const RunMetrics& m, bool include_wall_time) {
  nlohmann::ordered_json j;
  j["schema_version"] = kMetricsSchemaVersion;
  j["protocol"] = m.protocol;
  j["n"] = m.n;
  j["k"] = m.k;
  j["t"] = m.t;
  j["mu"] = m.mu;
  j["mu_prime"] = m.mu_prime;
  j["rounds"] = m.rounds;
  j["flights"] = m.flights;
  j["transcript_hash"] = m.transcript_hash;
  auto parties = nlohmann::ordered_json::array();
  for (const auto& p : m.parties) {
    nlohmann::ordered_json q;
    q["id"] = p.id;
    q["role"] = p.id == 0 ? "server" : "client";
    q["bytes_up"] = p.bytes_up;
    q["bytes_down"] = p.bytes_down;
    q["messages_up"] = p.messages_up;
    q["messages_down"] = p.messages_down;
    q["items"] = {{"ahe_ciphertexts", p.items.ahe_ct}, {"points", p.items.point},     {"gc_rows", p.items.gc_row},
                  {"labels", p.items.label},           {"plain_bits", p.items.plain_bit}, {"she_ciphertexts", p.items.she_ct},
                  {"sealed", p.items.sealed}};
    parties.push_back(std::move(q));
  }
  j["parties"] = std::move(parties);
  j["result"] = m.result ? nlohmann::ordered_json(*m.result) : nlohmann::ordered_json(nullptr);
  j["aborted"] = m.aborted;
  if (m.aborted) j["abort_reason"] = m.abort_reason;
  if (include_wall_time) j["wall_time_ms"] = m.wall_time_ms;
  return j.dump(2);
}

const std::string& bench_csv_header() {
  static const std::string h =
      "protocol,n,k,t,mu,rounds,time_ms,c_bits,s_bits,c_ahe_ct,s_ahe_ct,c_points,s_points,c_gc_rows,c_labels,"
      "s_plain_bits,c_she_ct,s_she_ct,c_sealed,s_sealed,ok";
  return h;
}

std::string bench_csv_line(const BenchRow& r) {
  std::ostringstream os;
  os << r.protocol << ',' << r.n << ',' << r.k << ',' << r.t << ',' << r.mu << ',' << r.rounds << ',' << std::fixed
     << std::setprecision(1) << r.time_ms << ',' << r.client_bits << ',' << r.server_bits << ',' << r.client_items.ahe_ct
     << ',' << r.server_items.ahe_ct << ',' << r.client_items.point << ',' << r.server_items.point << ','
     << r.client_items.gc_row << ',' << r.client_items.label << ',' << r.server_items.plain_bit << ','
     << r.client_items.she_ct << ',' << r.server_items.she_ct << ',' << r.client_items.sealed << ','
     << r.server_items.sealed << ',' << (r.ok ? 1 : 0);
  return os.str();
}

BenchRow bench_protocol(const SessionParams& params, std::span<const std::uint64_t> inputs) {
  const SimulationResult res = run_simulation(params, inputs);
  const RunMetrics m = collect_metrics(res);
  BenchRow row;
  row.protocol = m.protocol;
  row.n = m.n;
  row.k = m.k;
  row.t = m.t;
  row.mu = m.mu;
  row.rounds = m.rounds;
  row.time_ms = res.wall_ms;
  row.ok = res.ok();
  row.server_bits = m.parties[0].bytes_up * 8;
  row.server_items = m.parties[0].items;
  auto& c = row.client_items;
  for (std::size_t i = 1; i < m.parties.size(); ++i) {
    const auto& p = m.parties[i];
    row.client_bits = std::max(row.client_bits, p.bytes_up * 8);
    c.ahe_ct = std::max(c.ahe_ct, p.items.ahe_ct);
    c.point = std::max(c.point, p.items.point);
    c.gc_row = std::max(c.gc_row, p.items.gc_row);
    c.label = std::max(c.label, p.items.label);
    c.plain_bit = std::max(c.plain_bit, p.items.plain_bit);
    c.she_ct = std::max(c.she_ct, p.items.she_ct);
    c.sealed = std::max(c.sealed, p.items.sealed);
  }
  return row;
}

}  // namespace skre::proto

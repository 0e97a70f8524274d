#include "skre/loopback.hpp"

#include "skre/errors.hpp"

namespace skre::net {

LoopbackNetwork::LoopbackNetwork(const Router& router, Endpoint& server, std::vector<Endpoint*> clients, LoopbackOptions options)
    : router_(router),
      server_(server),
      clients_(std::move(clients)),
      options_(std::move(options)),
      scheduler_(Prng::from_seed(options_.schedule_seed, "skre-loopback-schedule")),
      up_(clients_.size() + 1),
      down_(clients_.size() + 1) {
  if (clients_.size() != router_.n()) throw ConfigError("loopback: need exactly n client endpoints");
}

void LoopbackNetwork::push_from_server(std::vector<Envelope> out) {
  for (auto& e : out) {
    if (e.sender != kServerId || e.receiver == kServerId || e.receiver > clients_.size()) {
      throw ProtocolAbort("server emitted a misaddressed envelope");
    }
    if (crashed(e.receiver)) continue;
    down_[e.receiver].push_back({std::move(e), false});
  }
}

void LoopbackNetwork::push_from_client(PartyId id, std::vector<Envelope> out) {
  for (auto& e : out) {
    if (e.sender != id) throw ProtocolAbort("client " + std::to_string(id) + " spoofed its sender id");
    up_[id].push_back({std::move(e), false});
  }
}

void LoopbackNetwork::deliver_uplink(PartyId id) {
  Queued q = std::move(up_[id].front());
  up_[id].pop_front();
  const Route r = router_.route(q.env);
  switch (r.kind) {
    case Route::Kind::ToServer:
      transcript_.record(q.env, false);
      push_from_server(server_.on_envelope(q.env));
      break;
    case Route::Kind::Relay:
      transcript_.record(q.env, true);
      if (!crashed(r.target)) down_[r.target].push_back({std::move(q.env), true});
      break;
    case Route::Kind::Reject:
      down_[id].push_back({r.reply, false});
      break;
    case Route::Kind::ToClient:
      throw ProtocolAbort("client uplink carried a server envelope");
  }
}

void LoopbackNetwork::deliver_downlink(PartyId id) {
  Queued q = std::move(down_[id].front());
  down_[id].pop_front();
  if (crashed(id)) return;
  if (options_.crash_after_setup.count(id) != 0) {
    crashed_.insert(id);
    up_[id].clear();
    down_[id].clear();
    push_from_server(server_.on_peer_lost(id));
    return;
  }
  if (!q.relayed) transcript_.record(q.env, false);
  push_from_client(id, clients_[id - 1]->on_envelope(q.env));
}

void LoopbackNetwork::run() {
  push_from_server(server_.start());
  for (PartyId id = 1; id <= clients_.size(); ++id) push_from_client(id, clients_[id - 1]->start());
  std::vector<std::size_t> ready;
  for (;;) {
    ready.clear();
    for (std::size_t c = 1; c < up_.size(); ++c) {
      if (!up_[c].empty()) ready.push_back(2 * c);
      if (!down_[c].empty()) ready.push_back(2 * c + 1);
    }
    if (ready.empty()) return;
    if (++deliveries_ > options_.max_deliveries) throw ProtocolAbort("loopback: delivery limit exceeded");
    const std::size_t pick = ready[scheduler_.uniform(ready.size())];
    if (pick % 2 == 0) {
      deliver_uplink(static_cast<PartyId>(pick / 2));
    } else {
      deliver_downlink(static_cast<PartyId>(pick / 2));
    }
  }
}

}  // namespace skre::net

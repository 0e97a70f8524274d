#include "skre/router.hpp"

#include <algorithm>

#include "skre/wire.hpp"

namespace skre::net {

Envelope Router::error_reply(const Envelope& offending, const std::string& reason) const {
  Envelope e;
  e.protocol = protocol_;
  e.session = session_;
  e.round = offending.round;
  e.sender = kServerId;
  e.receiver = offending.sender;
  e.payload = wire::PayloadWriter(kRouterErrorKind).text(reason).take();
  return e;
}

Route Router::route(const Envelope& e) const {
  Route r;
  auto reject = [&](const std::string& why) {
    r.kind = Route::Kind::Reject;
    r.target = e.sender;
    r.reply = error_reply(e, why);
    return r;
  };
  if (e.protocol != protocol_) return reject("protocol does not match the session");
  if (e.session != session_) return reject("unknown session");
  if (e.sender > n_) return reject("unknown sender");
  if (e.receiver > n_) return reject("unknown receiver " + std::to_string(e.receiver));
  if (e.sender == e.receiver) return reject("sender and receiver coincide");
  r.target = e.receiver;
  if (e.receiver == kServerId) {
    r.kind = Route::Kind::ToServer;
  } else if (e.sender == kServerId) {
    r.kind = Route::Kind::ToClient;
  } else {
    r.kind = Route::Kind::Relay;
  }
  return r;
}

void Transcript::record(const Envelope& e, bool relayed) {
  entries_.push_back({e.encode(), e.sender, e.receiver, e.round, relayed});
}

Digest Transcript::hash() const {
  std::vector<const Bytes*> sorted;
  sorted.reserve(entries_.size());
  for (const auto& en : entries_) sorted.push_back(&en.encoded);
  std::sort(sorted.begin(), sorted.end(), [](const Bytes* a, const Bytes* b) { return *a < *b; });
  Sha256 h;
  h.update("skre-transcript");
  for (const Bytes* b : sorted) h.update_u64(b->size()).update(*b);
  return h.finish();
}

std::string Transcript::hash_hex() const {
  const Digest d = hash();
  return to_hex(d);
}

}  // namespace skre::net

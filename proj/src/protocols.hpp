#pragma once

#include <map>
#include <memory>
#include <utility>

#include "skre/errors.hpp"
#include "skre/party.hpp"

namespace skre::proto {

using PairKey = std::pair<PartyId, PartyId>;

std::unique_ptr<ClientProtocol> make_ygc_client(const SessionParams&, PartyId, ClientKeys, std::uint64_t, Prng);
std::unique_ptr<ServerProtocol> make_ygc_server(const SessionParams&, ServerKeys, Prng);
std::unique_ptr<ClientProtocol> make_lin_client(const SessionParams&, PartyId, ClientKeys, std::uint64_t, Prng);
std::unique_ptr<ServerProtocol> make_lin_server(const SessionParams&, ServerKeys, Prng);
std::unique_ptr<ClientProtocol> make_dgk_client(const SessionParams&, PartyId, ClientKeys, std::uint64_t, Prng);
std::unique_ptr<ServerProtocol> make_dgk_server(const SessionParams&, ServerKeys, Prng);
std::unique_ptr<ClientProtocol> make_she_client(const SessionParams&, PartyId, ClientKeys, std::uint64_t, Prng);
std::unique_ptr<ServerProtocol> make_she_server(const SessionParams&, ServerKeys, Prng);

// Throws WireError unless the message came from the expected party.
void expect_sender(const Envelope& e, PartyId expected);

template <class T>
void store_once(std::map<PairKey, T>& m, const PairKey& key, T value) {
  if (!m.emplace(key, std::move(value)).second) throw WireError("duplicate message");
}

}  // namespace skre::proto

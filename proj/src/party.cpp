#include "skre/party.hpp"

#include <algorithm>

#include "skre/errors.hpp"
#include "skre/hash.hpp"
#include "skre/messages.hpp"

namespace skre::proto {

std::uint64_t derive_session_id(net::ProtocolId protocol, const core::ProtocolConfig& c) {
  Sha256 h;
  h.update("skre-session");
  h.update_u64(static_cast<std::uint64_t>(protocol)).update_u64(c.n).update_u64(c.k).update_u64(c.t);
  h.update_u64(c.mu).update_u64(c.lambda).update_u64(c.seed);
  const Digest d = h.finish();
  std::uint64_t id = 0;
  for (int i = 0; i < 8; ++i) id = (id << 8) | d[i];
  return id;
}

SessionParams make_params(net::ProtocolId protocol, const core::ProtocolConfig& config, bool deterministic) {
  config.validate();
  if (protocol == net::ProtocolId::She && config.t != config.n) {
    throw ConfigError("she requires t = n (n-out-of-n decryption key)");
  }
  SessionParams p;
  p.protocol = protocol;
  p.config = config;
  p.session_id = derive_session_id(protocol, config);
  p.deterministic = deterministic;
  return p;
}

namespace {

Prng root_rng(const SessionParams& p, std::string_view domain) {
  return p.deterministic ? Prng::from_seed(p.config.seed, domain) : Prng::from_os_entropy(domain);
}

std::uint32_t she_depth_budget(const core::ProtocolConfig& c) { return c.mu_prime() + c.n + 1; }

}  // namespace

DealerOutput run_dealer(const SessionParams& p) {
  DealerOutput out;
  Prng rng = root_rng(p, "skre-dealer");
  switch (p.protocol) {
    case net::ProtocolId::AheLin:
    case net::ProtocolId::AheDgk:
      out.ahe = aheg::threshold_keygen(p.config.n, p.config.t, rng);
      break;
    case net::ProtocolId::She:
      out.she = she::debug_keygen(p.config.n, she::default_slot_count(p.config.mu_prime()), she_depth_budget(p.config), rng);
      break;
    case net::ProtocolId::Ygc:
      break;
  }
  return out;
}

ServerKeys server_keys(const DealerOutput& dealer) {
  ServerKeys k;
  if (dealer.ahe) k.common_pk = dealer.ahe->pk;
  if (dealer.she) k.she_context = dealer.she->context;
  return k;
}

Bytes abort_payload(const std::string& reason) { return wire::PayloadWriter(raw(Kind::Abort)).text(reason).take(); }

// ---- ClientProtocol ----

ClientProtocol::ClientProtocol(const SessionParams& params, PartyId self, ClientKeys keys, std::uint64_t input, Prng rng)
    : params_(params),
      self_(self),
      keys_(std::move(keys)),
      x_(core::make_distinct({input, self}, params.config.n, params.config.mu)),
      bits_(core::BitVector::of(x_.value, x_.bitlength)),
      rng_(std::move(rng)) {}

Envelope ClientProtocol::to_server(std::uint16_t round, Bytes payload) const { return to_peer(core::kServerId, round, std::move(payload)); }

Envelope ClientProtocol::to_peer(PartyId peer, std::uint16_t round, Bytes payload) const {
  Envelope e;
  e.protocol = params_.protocol;
  e.session = params_.session_id;
  e.round = round;
  e.sender = self_;
  e.receiver = peer;
  e.payload = std::move(payload);
  return e;
}

const PeerInfo& ClientProtocol::peer(PartyId id) const {
  if (id < 1 || id > dir_.size()) throw WireError("unknown peer " + std::to_string(id));
  return dir_[id - 1];
}

void ClientProtocol::finish(const aheg::Point& q) {
  const auto v = aheg::decode_bounded(q, std::uint64_t{1} << params_.config.mu_prime());
  if (!v) throw ProtocolAbort("final ciphertext does not decode to a bounded value");
  output_ = core::strip_index(*v, params_.config.n);
}

// ---- ServerProtocol ----

ServerProtocol::ServerProtocol(const SessionParams& params, ServerKeys keys, Prng rng)
    : params_(params), keys_(std::move(keys)), rng_(std::move(rng)) {}

void ServerProtocol::set_directory(Directory d) {
  dir_ = std::move(d);
  roster_.clear();
  for (const auto& p : dir_) {
    if (p.live) roster_.push_back(p.id);
  }
}

std::vector<Envelope> ServerProtocol::peer_lost(PartyId id) {
  throw ProtocolAbort("client " + std::to_string(id) + " disconnected");
}

Envelope ServerProtocol::to_client(PartyId id, std::uint16_t round, Bytes payload) {
  if (round < round_) throw std::logic_error("server round counter moved backwards");
  round_ = round;
  Envelope e;
  e.protocol = params_.protocol;
  e.session = params_.session_id;
  e.round = round;
  e.sender = core::kServerId;
  e.receiver = id;
  e.payload = std::move(payload);
  return e;
}

const PeerInfo& ServerProtocol::peer(PartyId id) const {
  if (id < 1 || id > dir_.size()) throw WireError("unknown client " + std::to_string(id));
  return dir_[id - 1];
}

bool ServerProtocol::in_roster(PartyId id) const { return std::find(roster_.begin(), roster_.end(), id) != roster_.end(); }

std::uint32_t ServerProtocol::position(PartyId id) const {
  const auto it = std::find(roster_.begin(), roster_.end(), id);
  if (it == roster_.end()) throw WireError("client " + std::to_string(id) + " is not in the roster");
  return static_cast<std::uint32_t>(it - roster_.begin()) + 1;
}

void ServerProtocol::shrink_roster(PartyId id) {
  roster_.erase(std::remove(roster_.begin(), roster_.end(), id), roster_.end());
  dir_[id - 1].live = false;
  if (live() < params_.config.t) {
    throw ThresholdFailure("threshold failure: " + std::to_string(live()) + " live clients, t = " +
                           std::to_string(params_.config.t));
  }
  if (params_.config.k > live()) {
    throw ThresholdFailure("rank " + std::to_string(params_.config.k) + " exceeds the " + std::to_string(live()) +
                           " live clients");
  }
}

// ---- ClientSession ----

ClientSession::ClientSession(const SessionParams& params, PartyId self, std::uint64_t input, const DealerOutput& dealer)
    : params_(params), self_(self) {
  if (self < 1 || self > params.config.n) throw ConfigError("client id outside [1, n]");
  if (params.config.mu < 64 && (input >> params.config.mu) != 0) {
    throw ConfigError("input of client " + std::to_string(self) + " does not fit in mu bits");
  }
  Prng base = (params.deterministic ? Prng::from_seed(params.config.seed, "skre-party")
                                    : Prng::from_os_entropy("skre-party"))
                  .fork("client", {self});
  ClientKeys keys;
  {
    Prng r = base.fork("personal-key");
    keys.personal = aheg::keygen(r);
  }
  {
    Prng r = base.fork("dh-key");
    keys.dh = aheg::keygen(r);
  }
  if (dealer.ahe) {
    keys.common_pk = dealer.ahe->pk;
    keys.threshold_share = dealer.ahe->shares.at(self - 1);
  }
  if (dealer.she) {
    keys.she_share = dealer.she->shares.at(self - 1);
    keys.she_context = dealer.she->context;
  }
  protocol_ = make_client_protocol(params, self, std::move(keys), input, base.fork("protocol"));
}

std::vector<Envelope> ClientSession::start() {
  wire::PayloadWriter w(raw(Kind::Register));
  w.point(protocol_->keys().personal.pk).point(protocol_->keys().dh.pk);
  Envelope e;
  e.protocol = params_.protocol;
  e.session = params_.session_id;
  e.round = 0;
  e.sender = self_;
  e.receiver = core::kServerId;
  e.payload = w.take();
  return {std::move(e)};
}

std::vector<Envelope> ClientSession::on_envelope(const Envelope& e) {
  if (finished()) return {};
  try {
    wire::PayloadReader r(e.payload);
    const std::uint8_t kind = r.kind();
    if (kind == raw(Kind::Abort) || kind == net::kRouterErrorKind) {
      failed_ = true;
      error_ = (kind == raw(Kind::Abort) ? "session aborted: " : "rejected by router: ") + r.text();
      return {};
    }
    if (kind == raw(Kind::Directory)) {
      if (have_directory_) throw WireError("duplicate directory");
      const std::uint32_t n = r.u32();
      if (n != params_.config.n) throw WireError("directory size does not match n");
      Directory dir(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        dir[i].id = r.u32();
        if (dir[i].id != i + 1) throw WireError("directory out of order");
        dir[i].pk = r.point();
        dir[i].dh = r.point();
      }
      r.expect_end();
      protocol_->set_directory(std::move(dir));
      have_directory_ = true;
      return protocol_->begin();
    }
    if (!have_directory_) throw WireError("protocol message before the directory");
    return protocol_->handle(e, r);
  } catch (const std::exception& ex) {
    failed_ = true;
    error_ = ex.what();
    return {};
  }
}

// ---- ServerSession ----

ServerSession::ServerSession(const SessionParams& params, const DealerOutput& dealer) : params_(params) {
  Prng rng = (params.deterministic ? Prng::from_seed(params.config.seed, "skre-party")
                                   : Prng::from_os_entropy("skre-party"))
                 .fork("server");
  protocol_ = make_server_protocol(params, server_keys(dealer), std::move(rng));
  dir_.resize(params.config.n);
}

std::vector<Envelope> ServerSession::abort(const std::string& reason) {
  status_ = Status::Aborted;
  reason_ = reason;
  std::vector<Envelope> out;
  for (PartyId id = 1; id <= params_.config.n; ++id) {
    if (lost_.count(id) || !registered_.count(id)) continue;
    Envelope e;
    e.protocol = params_.protocol;
    e.session = params_.session_id;
    e.round = protocol_->round();
    e.sender = core::kServerId;
    e.receiver = id;
    e.payload = abort_payload(reason);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Envelope> ServerSession::guarded(const std::function<std::vector<Envelope>()>& step) {
  try {
    auto out = step();
    if (protocol_->done()) status_ = Status::Done;
    return out;
  } catch (const std::exception& ex) {
    return abort(ex.what());
  }
}

std::vector<Envelope> ServerSession::on_envelope(const Envelope& e) {
  if (finished()) return {};
  return guarded([&]() -> std::vector<Envelope> {
    wire::PayloadReader r(e.payload);
    if (r.kind() == raw(Kind::Register)) {
      if (status_ != Status::Registering || registered_.count(e.sender)) {
        Envelope reply;
        reply.protocol = params_.protocol;
        reply.session = params_.session_id;
        reply.round = e.round;
        reply.sender = core::kServerId;
        reply.receiver = e.sender;
        reply.payload = wire::PayloadWriter(net::kRouterErrorKind).text("re-registration rejected").take();
        return {std::move(reply)};
      }
      PeerInfo& p = dir_[e.sender - 1];
      p.id = e.sender;
      p.pk = r.point();
      p.dh = r.point();
      r.expect_end();
      registered_.insert(e.sender);
      if (registered_.size() < params_.config.n) return {};

      wire::PayloadWriter w(raw(Kind::Directory));
      w.u32(params_.config.n);
      for (const auto& peer : dir_) w.u32(peer.id).point(peer.pk).point(peer.dh);
      const Bytes directory = w.take();
      std::vector<Envelope> out;
      for (const auto& peer : dir_) {
        Envelope d;
        d.protocol = params_.protocol;
        d.session = params_.session_id;
        d.round = 0;
        d.sender = core::kServerId;
        d.receiver = peer.id;
        d.payload = directory;
        out.push_back(std::move(d));
      }
      status_ = Status::Running;
      protocol_->set_directory(dir_);
      for (auto& m : protocol_->begin()) out.push_back(std::move(m));
      return out;
    }
    if (status_ != Status::Running) throw WireError("protocol message during registration");
    return protocol_->handle(e, r);
  });
}

std::vector<Envelope> ServerSession::on_peer_lost(PartyId id) {
  if (finished() || lost_.count(id)) return {};
  lost_.insert(id);
  if (status_ == Status::Registering) return abort("client " + std::to_string(id) + " lost during registration");
  return guarded([&] { return protocol_->peer_lost(id); });
}

}  // namespace skre::proto

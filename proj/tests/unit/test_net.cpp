#include <algorithm>
#include <thread>

#include "commands.hpp"
#include "doctest.h"
#include "skre/errors.hpp"
#include "skre/loopback.hpp"
#include "skre/messages.hpp"
#include "skre/party.hpp"
#include "skre/session.hpp"
#include "skre/tcp.hpp"
#include "skre/wire.hpp"

using namespace skre;
using namespace skre::net;

namespace {

constexpr std::uint64_t kSession = 77;

Envelope make(PartyId from, PartyId to, std::uint16_t round, Bytes payload) {
  Envelope e;
  e.protocol = ProtocolId::AheDgk;
  e.session = kSession;
  e.round = round;
  e.sender = from;
  e.receiver = to;
  e.payload = std::move(payload);
  return e;
}

Bytes seq_payload(std::uint32_t s) { return wire::PayloadWriter(0x70).u32(s).take(); }

// Sends a fixed script on start and records everything it receives.
struct Scripted : Endpoint {
  std::vector<Envelope> script;
  std::vector<Envelope> received;
  std::vector<Envelope> start() override { return std::move(script); }
  std::vector<Envelope> on_envelope(const Envelope& e) override {
    received.push_back(e);
    return {};
  }
  bool finished() const override { return true; }
};

struct Star {
  Router router{ProtocolId::AheDgk, kSession, 5};
  Scripted server;
  std::vector<Scripted> clients = std::vector<Scripted>(5);

  Transcript run(std::uint64_t schedule = 0) {
    std::vector<Endpoint*> ptrs;
    for (auto& c : clients) ptrs.push_back(&c);
    LoopbackOptions o;
    o.schedule_seed = schedule;
    LoopbackNetwork net(router, server, ptrs, o);
    net.run();
    return net.transcript();
  }
};

std::uint32_t seq_of(const Envelope& e) {
  wire::PayloadReader r(e.payload);
  return r.u32();
}

proto::SessionParams params_for(ProtocolId p, std::uint32_t n, std::uint32_t k, std::uint32_t t) {
  core::ProtocolConfig c;
  c.n = n;
  c.k = k;
  c.t = t;
  c.seed = 5;
  return proto::make_params(p, c);
}

bool contains(const Bytes& hay, const Bytes& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_CASE("envelope encoding") {
  const auto e = make(3, 0, 2, {1, 2, 3});
  const Bytes b = e.encode();
  CHECK(b.size() == e.wire_size());
  CHECK(b.size() == kHeaderBytes + 3);
  const auto d = Envelope::decode(b);
  CHECK(d.sender == 3);
  CHECK(d.receiver == 0);
  CHECK(d.round == 2);
  CHECK(d.session == kSession);
  CHECK(d.payload == Bytes{1, 2, 3});
  Bytes bad = b;
  bad[0] = 'X';
  CHECK_THROWS_AS(Envelope::decode(bad), WireError);
  Bytes cut(b.begin(), b.end() - 1);
  CHECK_THROWS_AS(Envelope::decode(cut), WireError);
}

TEST_CASE("payload items are tagged and tallied") {
  Prng rng = Prng::from_seed(1, "test-net");
  const auto kp = aheg::keygen(rng);
  std::vector<aheg::AheCiphertext> cts = {aheg::encrypt(kp.pk, 1, rng), aheg::encrypt(kp.pk, 2, rng)};
  wire::PayloadWriter w(0x55);
  w.u32(4).bit(true).point(kp.pk).cts(cts).text("x");
  const Bytes p = w.take();
  CHECK(wire::payload_kind(p) == 0x55);
  const auto t = wire::tally(p);
  CHECK(t.ahe_ct == 2);
  CHECK(t.point == 1);
  CHECK(t.plain_bit == 1);
  const auto tags = wire::tags(p);
  CHECK(tags == std::vector<wire::Tag>{wire::Tag::U32, wire::Tag::Bit, wire::Tag::Point, wire::Tag::AheCt, wire::Tag::AheCt,
                                       wire::Tag::Text});
  wire::PayloadReader r(p);
  CHECK(r.u32() == 4);
  CHECK_THROWS_AS(r.u32(), WireError);
}

TEST_CASE("relay preserves payload bytes") {
  Star s;
  const Bytes payload = {9, 8, 7, 6, 5, 0, 255};
  s.clients[0].script.push_back(make(1, 2, 1, payload));
  const auto t = s.run();
  REQUIRE(s.clients[1].received.size() == 1);
  CHECK(s.clients[1].received[0].payload == payload);
  CHECK(s.clients[1].received[0].sender == 1);
  CHECK(s.server.received.empty());
  REQUIRE(t.entries().size() == 1);
  CHECK(t.entries()[0].relayed);
}

TEST_CASE("unknown receiver gets an error reply") {
  Star s;
  s.clients[0].script.push_back(make(1, 99, 1, {1}));
  s.run();
  REQUIRE(s.clients[0].received.size() == 1);
  const auto& e = s.clients[0].received[0];
  CHECK(e.sender == kServerId);
  CHECK(wire::payload_kind(e.payload) == kRouterErrorKind);
  wire::PayloadReader r(e.payload);
  CHECK(r.text().find("receiver") != std::string::npos);

  Router router(ProtocolId::AheDgk, kSession, 5);
  auto wrong_session = make(1, 0, 1, {1});
  wrong_session.session = 1;
  CHECK(router.route(wrong_session).kind == Route::Kind::Reject);
  CHECK(router.route(make(2, 2, 1, {1})).kind == Route::Kind::Reject);
  CHECK(router.route(make(2, 0, 1, {1})).kind == Route::Kind::ToServer);
  CHECK(router.route(make(0, 4, 1, {1})).kind == Route::Kind::ToClient);
}

TEST_CASE("per-sender FIFO under a shuffled schedule") {
  for (std::uint64_t schedule : {0ull, 1ull, 2ull}) {
    Star s;
    for (std::uint32_t i = 0; i < 100; ++i) {
      s.clients[0].script.push_back(make(1, 0, 1, seq_payload(i)));
      s.clients[0].script.push_back(make(1, 3, 1, seq_payload(i)));
      s.clients[1].script.push_back(make(2, 0, 1, seq_payload(1000 + i)));
    }
    s.run(schedule);
    std::vector<std::uint32_t> from1, from2, relayed;
    for (const auto& e : s.server.received) (e.sender == 1 ? from1 : from2).push_back(seq_of(e));
    for (const auto& e : s.clients[2].received) relayed.push_back(seq_of(e));
    REQUIRE(from1.size() == 100);
    REQUIRE(from2.size() == 100);
    REQUIRE(relayed.size() == 100);
    for (std::uint32_t i = 0; i < 100; ++i) {
      CHECK(from1[i] == i);
      CHECK(from2[i] == 1000 + i);
      CHECK(relayed[i] == i);
    }
  }
}

TEST_CASE("frames survive fragmentation") {
  const auto a = make(1, 0, 1, Bytes(1000, 0xAB)), b = make(2, 0, 1, Bytes(3, 0x01));
  Bytes stream = frame(a);
  const Bytes fb = frame(b);
  stream.insert(stream.end(), fb.begin(), fb.end());
  FrameReader r;
  std::vector<Bytes> got;
  for (std::size_t i = 0; i < stream.size(); i += 7) {
    const std::size_t len = std::min<std::size_t>(7, stream.size() - i);
    r.feed(std::span<const std::uint8_t>(stream.data() + i, len));
    while (auto f = r.next()) got.push_back(*f);
  }
  REQUIRE(got.size() == 2);
  CHECK(Envelope::decode(got[0]).payload == a.payload);
  CHECK(Envelope::decode(got[1]).payload == b.payload);
  CHECK(r.buffered() == 0);
}

TEST_CASE("oversize frames are rejected") {
  FrameReader r;
  const std::uint32_t len = static_cast<std::uint32_t>(kMaxFrameBytes + 1);
  const Bytes header = {static_cast<std::uint8_t>(len >> 24), static_cast<std::uint8_t>(len >> 16),
                        static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len)};
  r.feed(header);
  CHECK_THROWS_AS(r.next(), WireError);
  CHECK_THROWS_AS(frame(make(1, 0, 1, Bytes(kMaxFrameBytes, 0))), WireError);
}

TEST_CASE("address parsing") {
  const auto a = Address::parse("10.0.0.1:9000");
  CHECK(a.host == "10.0.0.1");
  CHECK(a.port == 9000);
  CHECK(Address::parse(":81").port == 81);
  CHECK_THROWS_AS(Address::parse("nohost"), ConfigError);
  CHECK_THROWS_AS(Address::parse("h:99999"), ConfigError);
  CHECK_THROWS_AS(Address::parse("h:x"), ConfigError);
}

TEST_CASE("connecting to a closed port fails") {
  // Bind and immediately release an ephemeral port so nothing listens there.
  std::uint16_t port = 0;
  {
    Router router(ProtocolId::Ygc, 1, 1);
    Scripted server;
    TcpServerOptions so;
    so.bind = Address::parse("127.0.0.1:0");
    so.timeout = std::chrono::milliseconds(1);
    so.on_listening = [&](std::uint16_t p) { port = p; };
    CHECK_THROWS_AS(run_tcp_server(router, server, so), ProtocolAbort);
  }
  REQUIRE(port != 0);
  Scripted client;
  TcpClientOptions co;
  co.server.port = port;
  co.connect_timeout = std::chrono::milliseconds(300);
  CHECK_THROWS_AS(run_tcp_client(client, co), std::runtime_error);
}

TEST_CASE("TCP and loopback produce identical transcripts") {
  const std::vector<std::uint64_t> inputs = {40, 7, 19};
  for (ProtocolId p : {ProtocolId::Ygc, ProtocolId::AheDgk, ProtocolId::AheLin, ProtocolId::She}) {
    const auto params = params_for(p, 3, 2, p == ProtocolId::She ? 3 : 2);
    const auto loop = proto::run_simulation(params, inputs);
    const auto tcp = cli::simulate(params, inputs, "tcp", "127.0.0.1:0");
    REQUIRE(loop.ok());
    REQUIRE(tcp.ok());
    CHECK(loop.transcript.hash_hex() == tcp.transcript.hash_hex());
    CHECK(loop.transcript.entries().size() == tcp.transcript.entries().size());
    CHECK(tcp.outputs[0] == 19u);
  }
}

TEST_CASE("setup distributes one key set per client and the dealer stays off the wire") {
  const auto params = params_for(ProtocolId::AheDgk, 3, 2, 2);
  const auto dealer = proto::run_dealer(params);
  REQUIRE(dealer.ahe.has_value());
  CHECK(dealer.ahe->shares.size() == 3);
  const auto res = proto::run_simulation(params, std::vector<std::uint64_t>{3, 1, 2});
  REQUIRE(res.ok());
  std::size_t registrations = 0, directories = 0;
  for (const auto& e : res.transcript.entries()) {
    const auto env = Envelope::decode(e.encoded);
    CHECK(env.sender <= 3);
    CHECK(env.receiver <= 3);
    const auto kind = wire::payload_kind(env.payload);
    if (kind == proto::raw(proto::Kind::Register)) {
      ++registrations;
      CHECK(wire::tally(env.payload).point == 2);  // personal key and DH value
    }
    if (kind == proto::raw(proto::Kind::Directory)) {
      ++directories;
      CHECK(wire::tally(env.payload).point == 6);
    }
    for (const auto& share : dealer.ahe->shares) CHECK(!contains(e.encoded, share.value.to_bytes()));
  }
  CHECK(registrations == 3);
  CHECK(directories == 3);
}

TEST_CASE("re-registration is rejected") {
  const auto params = params_for(ProtocolId::AheDgk, 3, 2, 2);
  const auto dealer = proto::run_dealer(params);
  proto::ServerSession server(params, dealer);
  proto::ClientSession client(params, 1, 5, dealer);
  const auto reg = client.start();
  REQUIRE(reg.size() == 1);
  CHECK(server.on_envelope(reg[0]).empty());
  const auto again = server.on_envelope(reg[0]);
  REQUIRE(again.size() == 1);
  CHECK(again[0].receiver == 1);
  CHECK(wire::payload_kind(again[0].payload) == kRouterErrorKind);
  CHECK(server.status() == proto::ServerSession::Status::Registering);
}

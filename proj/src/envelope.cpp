#include "skre/envelope.hpp"

#include "skre/errors.hpp"

namespace skre::net {

std::string_view protocol_name(ProtocolId p) {
  switch (p) {
    case ProtocolId::Ygc: return "ygc";
    case ProtocolId::AheLin: return "ahe-lin";
    case ProtocolId::AheDgk: return "ahe-dgk";
    case ProtocolId::She: return "she";
  }
  return "unknown";
}

ProtocolId parse_protocol(std::string_view name) {
  if (name == "ygc") return ProtocolId::Ygc;
  if (name == "ahe-lin") return ProtocolId::AheLin;
  if (name == "ahe-dgk") return ProtocolId::AheDgk;
  if (name == "she") return ProtocolId::She;
  throw ConfigError("unknown protocol '" + std::string(name) + "' (expected ygc, ahe-lin, ahe-dgk or she)");
}

Bytes Envelope::encode() const {
  ByteWriter w;
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>("SKRE"), 4));
  w.u8(kEnvelopeVersion);
  w.u16(static_cast<std::uint16_t>(protocol));
  w.u64(session);
  w.u16(round);
  w.u32(sender);
  w.u32(receiver);
  w.u64(payload.size());
  w.raw(payload);
  return w.take();
}

Envelope Envelope::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.raw(4);
  if (magic[0] != 'S' || magic[1] != 'K' || magic[2] != 'R' || magic[3] != 'E') throw WireError("envelope: bad magic");
  if (r.u8() != kEnvelopeVersion) throw WireError("envelope: unsupported version");
  Envelope e;
  const std::uint16_t proto = r.u16();
  if (proto < 1 || proto > 4) throw WireError("envelope: unknown protocol id " + std::to_string(proto));
  e.protocol = static_cast<ProtocolId>(proto);
  e.session = r.u64();
  e.round = r.u16();
  e.sender = r.u32();
  e.receiver = r.u32();
  const std::uint64_t len = r.u64();
  if (len != r.remaining()) throw WireError("envelope: payload length does not match");
  auto body = r.raw(static_cast<std::size_t>(len));
  e.payload.assign(body.begin(), body.end());
  return e;
}

}  // namespace skre::net

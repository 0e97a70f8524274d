#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "skre/bytes.hpp"
#include "skre/core.hpp"

namespace skre::net {

using core::PartyId;
using core::kServerId;

enum class ProtocolId : std::uint16_t { Ygc = 1, AheLin = 2, AheDgk = 3, She = 4 };

std::string_view protocol_name(ProtocolId p);
ProtocolId parse_protocol(std::string_view name);

inline constexpr std::uint8_t kEnvelopeVersion = 1;
inline constexpr std::size_t kHeaderBytes = 4 + 1 + 2 + 8 + 2 + 4 + 4 + 8;

struct Envelope {
  ProtocolId protocol = ProtocolId::Ygc;
  std::uint64_t session = 0;
  std::uint16_t round = 0;
  PartyId sender = 0;
  PartyId receiver = 0;
  Bytes payload;

  // magic "SKRE" | version u8 | protocol u16 | session u64 | round u16 | sender u32 |
  // receiver u32 | payload length u64 | payload, all big-endian.
  Bytes encode() const;
  static Envelope decode(std::span<const std::uint8_t> bytes);
  std::size_t wire_size() const { return kHeaderBytes + payload.size(); }
};

}  // namespace skre::net

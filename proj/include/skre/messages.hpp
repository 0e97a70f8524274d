#pragma once

#include <cstdint>
#include <string_view>

namespace skre::proto {

// First payload byte of every protocol message.
enum class Kind : std::uint8_t {
  Register = 0x01,
  Directory = 0x02,
  Abort = 0x03,

  YgcGarbled = 0x10,      // head -> S: circuit + generator labels
  YgcEvalInput = 0x11,    // tail -> S: evaluator labels
  YgcBlinded = 0x12,      // S -> head, tail: b' = b XOR both blinds
  YgcHalfUnblind = 0x13,  // client -> partner (relayed): Enc_own(b' XOR own blind)
  YgcUnblinded = 0x14,    // client -> S: Enc_partner(b)
  YgcBeta = 0x15,         // S -> client: Enc_own(alpha (r - k))
  YgcMasked = 0x16,       // client -> S: Enc_c(m) for every client c
  YgcResult = 0x17,       // S -> client: Enc_own(sum m)

  LinUpload = 0x20,
  LinDecReq = 0x21,
  LinPartialRow = 0x22,
  LinCombine = 0x23,
  LinCtilde = 0x24,
  LinKre = 0x25,
  LinFinalPartial = 0x26,
  LinFinal = 0x27,

  DgkUpload = 0x30,
  DgkBits = 0x31,    // S -> evaluator: generator's bit ciphertexts
  DgkReply = 0x32,   // evaluator -> generator (relayed): Z + share
  DgkResult = 0x33,  // generator -> S: Enc_common(b)
  DgkDecReq = 0x34,
  DgkPartial = 0x35,
  DgkCombine = 0x36,
  DgkMasked = 0x37,
  DgkFinal = 0x38,

  SheUpload = 0x40,
  SheKre = 0x41,
  SheFinalPartial = 0x42,
  SheFinal = 0x43,
};

inline constexpr std::uint8_t raw(Kind k) { return static_cast<std::uint8_t>(k); }

std::string_view kind_name(std::uint8_t kind);

// Setup and control messages; excluded from per-round accounting.
bool is_control_kind(std::uint8_t kind);

}  // namespace skre::proto

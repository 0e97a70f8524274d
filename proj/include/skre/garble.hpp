#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "skre/aheg.hpp"
#include "skre/bytes.hpp"
#include "skre/core.hpp"

namespace skre::garble {

inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kRowsPerAndGate = 2;

// A lambda-bit label stored in 16 bytes; bytes beyond lambda/8 are always zero.
// The colour (point-and-permute bit) is the least significant bit of byte 0.
struct WireLabel {
  std::array<std::uint8_t, 16> bytes{};

  bool color() const { return bytes[0] & 1; }
  WireLabel operator^(const WireLabel& o) const;
  WireLabel& operator^=(const WireLabel& o);
  bool operator==(const WireLabel&) const = default;
};

struct SharedSeed {
  std::array<std::uint8_t, 16> key{};
  unsigned lambda = 128;
  bool operator==(const SharedSeed&) const = default;
};

enum class Side : std::uint8_t { Generator, Evaluator };

// Half-gates garbling of the blinded comparator; mu_prime AND gates, 2 rows each.
struct GarbledComparator {
  unsigned mu_prime = 0;
  unsigned lambda = 128;
  bool decode_bit = false;
  std::vector<WireLabel> rows;

  std::size_t and_gates() const { return mu_prime; }
  Bytes serialize() const;
  static GarbledComparator deserialize(std::span<const std::uint8_t> bytes);
  bool operator==(const GarbledComparator&) const = default;
};

// Zero-labels of both parties' input wires: index 0 is the blind bit, then the
// value bits most significant first. The one-label is zero-label XOR delta.
struct InputEncoding {
  unsigned mu_prime = 0;
  unsigned lambda = 128;
  WireLabel delta;
  std::vector<WireLabel> generator_zero;
  std::vector<WireLabel> evaluator_zero;

  WireLabel label(Side side, std::size_t wire, bool value) const;
};

struct Garbling {
  GarbledComparator circuit;
  InputEncoding encoding;
};

SharedSeed dh_seed(const aheg::Scalar& own_secret, const aheg::Point& peer_public, unsigned lambda);

Garbling garble(const SharedSeed& seed, unsigned mu_prime, unsigned lambda);

std::vector<WireLabel> encode(const InputEncoding& e, Side side, bool blind, const core::BitVector& x);

// Returns blind_i XOR blind_j XOR [x_i >= x_j] for generator input x_i and evaluator input x_j.
bool evaluate(const GarbledComparator& f, std::span<const WireLabel> generator_input,
              std::span<const WireLabel> evaluator_input);

std::size_t label_wire_bytes(unsigned lambda);
void write_label(ByteWriter& w, const WireLabel& l, unsigned lambda);
WireLabel read_label(ByteReader& r, unsigned lambda);

}  // namespace skre::garble

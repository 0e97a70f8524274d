#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skre/prng.hpp"

namespace skre::core {

using PartyId = std::uint32_t;  // 0 is the server, clients are 1..n
inline constexpr PartyId kServerId = 0;

// Smallest w with 2^w >= v (0 for v <= 1).
unsigned ceil_log2(std::uint64_t v);

// Largest plaintext width the bounded decoder accepts.
inline constexpr unsigned kMaxMuPrime = 40;

struct ProtocolConfig {
  std::uint32_t n = 0;
  std::uint32_t k = 1;
  std::uint32_t t = 1;
  unsigned mu = 8;
  unsigned lambda = 128;
  std::uint64_t seed = 0;

  // Throws ConfigError when an invariant fails.
  void validate() const;
  unsigned index_bits() const { return ceil_log2(n); }
  unsigned mu_prime() const { return mu + index_bits(); }
};

struct PlainInput {
  std::uint64_t value = 0;
  std::uint32_t index = 0;  // 1-based party index
};

struct DistinctInput {
  std::uint64_t value = 0;
  unsigned bitlength = 0;
};

// Bits most significant first: bits[0] is x_{mu'}, bits.back() is x_1.
struct BitVector {
  std::vector<std::uint8_t> bits;

  static BitVector of(std::uint64_t value, unsigned width);
  std::size_t size() const { return bits.size(); }
  // Bit at 1-based position l counted from the least significant end.
  bool at(std::size_t l) const { return bits[bits.size() - l] != 0; }
  std::uint64_t to_uint() const;
};

// Lin-Tzeng prefix encodings. Entry index 0 holds position mu', the last holds position 1.
struct ZeroOneEncoding {
  unsigned bitlength = 0;
  std::vector<std::uint64_t> v0;
  std::vector<std::uint64_t> v1;
  std::vector<bool> proper0;
  std::vector<bool> proper1;
};

struct RankTable {
  std::vector<std::uint32_t> ranks;              // ranks[i] for party index i+1
  std::vector<std::vector<std::uint8_t>> bits;   // bits[i][j] = [x_{i+1} >= x_{j+1}]
};

DistinctInput make_distinct(const PlainInput& x, std::uint32_t n, unsigned mu);
std::uint64_t strip_index(std::uint64_t distinct_value, std::uint32_t n);

// Definition of which side of an unordered pair acts as the comparison head.
bool paired(std::uint32_t i, std::uint32_t j);

// (#heads, #tails) of party i in an n-party session.
std::pair<std::uint32_t, std::uint32_t> head_tail_counts(std::uint32_t i, std::uint32_t n);

ZeroOneEncoding encode_zero_one(const DistinctInput& x, Prng& rng);

// Ground truth: k-th smallest after index disambiguation, index bits stripped.
std::uint64_t kre_oracle(std::span<const PlainInput> values, std::uint32_t k);

// r_i = sum_j b_ij over a full row; `self` is the 1-based position of b_ii.
std::uint32_t rank_from_bits(std::span<const std::uint8_t> row, std::uint32_t self);

RankTable build_rank_table(std::span<const std::uint64_t> distinct_values);

}  // namespace skre::core

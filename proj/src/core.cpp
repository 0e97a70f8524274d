#include "skre/core.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "skre/errors.hpp"

namespace skre::core {

unsigned ceil_log2(std::uint64_t v) {
  if (v <= 1) return 0;
  return static_cast<unsigned>(std::bit_width(v - 1));
}

void ProtocolConfig::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (k < 1 || k > n) throw ConfigError("k must lie in [1, n]");
  if (t < 1 || t > n) throw ConfigError("t must lie in [1, n]");
  if (mu < 1) throw ConfigError("mu must be at least 1");
  if (lambda != 80 && lambda != 128) throw ConfigError("lambda must be 80 or 128");
  if (mu_prime() > kMaxMuPrime) {
    throw ConfigError("mu + ceil(log2 n) = " + std::to_string(mu_prime()) + " exceeds " + std::to_string(kMaxMuPrime));
  }
}

BitVector BitVector::of(std::uint64_t value, unsigned width) {
  if (width == 0 || width > 64) throw ConfigError("bit width must lie in [1, 64]");
  if (width < 64 && (value >> width) != 0) throw ConfigError("value does not fit in " + std::to_string(width) + " bits");
  BitVector v;
  v.bits.resize(width);
  for (unsigned i = 0; i < width; ++i) v.bits[i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1);
  return v;
}

std::uint64_t BitVector::to_uint() const {
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1);
  return v;
}

DistinctInput make_distinct(const PlainInput& x, std::uint32_t n, unsigned mu) {
  if (x.index < 1 || x.index > n) throw ConfigError("party index " + std::to_string(x.index) + " outside [1, n]");
  if (mu < 64 && (x.value >> mu) != 0) throw ConfigError("input value does not fit in mu bits");
  const unsigned shift = ceil_log2(n);
  if (mu + shift > 63) throw ConfigError("distinct input would exceed 63 bits");
  return {(x.value << shift) + (x.index - 1), mu + shift};
}

std::uint64_t strip_index(std::uint64_t distinct_value, std::uint32_t n) { return distinct_value >> ceil_log2(n); }

bool paired(std::uint32_t i, std::uint32_t j) {
  if (i == j) throw ConfigError("paired(i, i) is undefined");
  if (i == 0 || j == 0) throw ConfigError("party indexes are 1-based");
  const bool i_odd = i % 2 == 1;
  const bool j_odd = j % 2 == 1;
  if (i_odd) return i > j ? j_odd : !j_odd;
  return i > j ? !j_odd : j_odd;
}

std::pair<std::uint32_t, std::uint32_t> head_tail_counts(std::uint32_t i, std::uint32_t n) {
  if (i < 1 || i > n) throw ConfigError("party index outside [1, n]");
  if (n % 2 == 1) return {(n - 1) / 2, (n - 1) / 2};
  if (i % 2 == 1) return {n / 2, n / 2 - 1};
  return {n / 2 - 1, n / 2};
}

ZeroOneEncoding encode_zero_one(const DistinctInput& x, Prng& rng) {
  const unsigned w = x.bitlength;
  if (w == 0 || w > 62) throw ConfigError("encoding bitlength must lie in [1, 62]");
  if ((x.value >> w) != 0) throw ConfigError("value wider than its bitlength");
  ZeroOneEncoding e;
  e.bitlength = w;
  e.v0.resize(w);
  e.v1.resize(w);
  e.proper0.resize(w);
  e.proper1.resize(w);
  const std::uint64_t base = std::uint64_t{1} << w;
  auto random_element = [&](std::uint64_t lsb) { return ((base + rng.uniform(base)) & ~std::uint64_t{1}) | lsb; };
  for (unsigned l = 1; l <= w; ++l) {
    const std::size_t slot = w - l;
    const bool bit = (x.value >> (l - 1)) & 1;
    if (!bit) {
      e.v0[slot] = ((x.value >> l) << 1) | 1;
      e.proper0[slot] = true;
      e.v1[slot] = random_element(1);
    } else {
      e.v1[slot] = x.value >> (l - 1);
      e.proper1[slot] = true;
      e.v0[slot] = random_element(0);
    }
  }
  return e;
}

std::uint64_t kre_oracle(std::span<const PlainInput> values, std::uint32_t k) {
  if (values.empty()) throw ConfigError("kre_oracle: empty input");
  if (k < 1 || k > values.size()) throw ConfigError("kre_oracle: k outside [1, n]");
  std::vector<PlainInput> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), [](const PlainInput& a, const PlainInput& b) {
    return a.value != b.value ? a.value < b.value : a.index < b.index;
  });
  return sorted[k - 1].value;
}

std::uint32_t rank_from_bits(std::span<const std::uint8_t> row, std::uint32_t self) {
  if (self < 1 || self > row.size()) throw ConfigError("rank_from_bits: self position outside row");
  if (row[self - 1] != 1) throw ConfigError("rank_from_bits: b_ii must be 1");
  std::uint32_t r = 0;
  for (auto b : row) {
    if (b > 1) throw ConfigError("rank_from_bits: entries must be bits");
    r += b;
  }
  return r;
}

RankTable build_rank_table(std::span<const std::uint64_t> distinct_values) {
  const std::size_t n = distinct_values.size();
  RankTable t;
  t.bits.assign(n, std::vector<std::uint8_t>(n, 0));
  t.ranks.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.bits[i][j] = distinct_values[i] >= distinct_values[j] ? 1 : 0;
    t.ranks[i] = rank_from_bits(t.bits[i], static_cast<std::uint32_t>(i + 1));
  }
  return t;
}

}  // namespace skre::core

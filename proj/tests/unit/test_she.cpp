#include <algorithm>
#include <bit>

#include "doctest.h"
#include "skre/core.hpp"
#include "skre/errors.hpp"
#include "skre/she.hpp"

using namespace skre;
using namespace skre::she;

namespace {

struct Fixture {
  Prng rng;
  SheKeyMaterial keys;
  const DebugBackend& b;

  explicit Fixture(std::uint32_t n = 3, std::size_t slots = 16, std::uint32_t budget = 64, std::uint64_t seed = 21)
      : rng(Prng::from_seed(seed, "test-she")), keys(debug_keygen(n, slots, budget, rng)), b(*keys.context) {}

  std::vector<std::uint8_t> random_slots() {
    std::vector<std::uint8_t> s(b.slot_count());
    for (auto& v : s) v = rng.bit();
    return s;
  }
  SlotCiphertext one_bit(bool v) { return b.encrypt(std::vector<std::uint8_t>(b.slot_count(), v), rng); }
  bool read(const SlotCiphertext& c) { return b.peek(c)[0]; }
  std::uint64_t read_bits(std::span<const SlotCiphertext> cs) {
    std::uint64_t v = 0;
    for (const auto& c : cs) v = (v << 1) | read(c);
    return v;
  }
};

// Depth of the comparator ladder, popcount and equality chain as built, from the widths alone:
// ladder over w bits costs w; bit 2^k of the rank costs w + 2^k - 1; the equality ladder over
// the rank bits ends at w + 2^(width-1); masking the packed input adds one.
std::uint32_t kre_depth_oracle(unsigned w, std::uint32_t n) {
  const unsigned rank_width = core::ceil_log2(n + 1);
  std::uint32_t c = 0;
  for (unsigned k = 0; k < rank_width; ++k) {
    const std::uint32_t bit_depth = w + (1u << k) - 1;
    c = std::max(c, bit_depth) + 1;
  }
  return c + 1;
}

}  // namespace

TEST_CASE("slotwise xor and and") {
  Fixture f;
  const auto s = f.random_slots(), t = f.random_slots();
  const auto cs = f.b.encrypt(s, f.rng), ct = f.b.encrypt(t, f.rng);
  CHECK(f.b.peek(cs) == s);
  const auto zero = f.b.peek(she_add(f.b, cs, cs));
  CHECK(std::all_of(zero.begin(), zero.end(), [](auto v) { return v == 0; }));
  CHECK(f.b.peek(she_mult(f.b, cs, f.b.constant(true))) == s);
  std::vector<std::uint8_t> x(s.size()), a(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    x[j] = s[j] ^ t[j];
    a[j] = s[j] & t[j];
  }
  CHECK(f.b.peek(she_add(f.b, cs, ct)) == x);
  CHECK(f.b.peek(she_mult(f.b, cs, ct)) == a);
  CHECK(she_mult(f.b, cs, ct).depth == 1);
  CHECK(she_mult(f.b, she_mult(f.b, cs, ct), cs).depth == 2);
  CHECK(she_add(f.b, she_mult(f.b, cs, ct), cs).depth == 1);
}

TEST_CASE("depth budget and context checks") {
  Fixture f(2, 4, 2);
  auto c = f.one_bit(true);
  c = f.b.mult(c, c);
  c = f.b.mult(c, c);
  CHECK_THROWS_AS(f.b.mult(c, c), CryptoError);
  Fixture g(2, 4, 2, 22);
  CHECK_THROWS_AS(f.b.add(f.one_bit(true), g.one_bit(true)), CryptoError);
  CHECK_THROWS_AS(f.b.encrypt(std::vector<std::uint8_t>{2}, f.rng), ConfigError);
}

TEST_CASE("comparator") {
  Fixture f;
  auto x = encrypt_bits(f.b, 9, 4, f.rng);
  auto [gt, lt] = she_cmp(f.b, x, x);
  CHECK(f.read(gt) == false);
  CHECK(f.read(lt) == false);
  for (std::uint64_t a = 0; a < 16; ++a) {
    const auto ea = encrypt_bits(f.b, a, 4, f.rng);
    for (std::uint64_t c = 0; c < 16; ++c) {
      const auto ec = encrypt_bits(f.b, c, 4, f.rng);
      auto [g, l] = she_cmp(f.b, ea, ec);
      REQUIRE(f.read(g) == (a > c));
      REQUIRE(f.read(l) == (c > a));
      CHECK(g.depth == 4);
    }
  }
  CHECK_THROWS_AS(she_cmp(f.b, x, encrypt_bits(f.b, 1, 3, f.rng)), ConfigError);
}

TEST_CASE("popcount") {
  Fixture f;
  std::vector<SlotCiphertext> zeros(5, f.one_bit(false));
  CHECK(f.read_bits(she_fadder(f.b, zeros)) == 0);
  std::vector<SlotCiphertext> ones(7, f.one_bit(true));
  const auto seven = she_fadder(f.b, ones);
  CHECK(seven.size() == 3);
  CHECK(f.read_bits(seven) == 7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + f.rng.uniform(10);
    std::vector<SlotCiphertext> in;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool v = f.rng.bit();
      count += v;
      in.push_back(f.one_bit(v));
    }
    const auto out = she_fadder(f.b, in);
    REQUIRE(out.size() == core::ceil_log2(n + 1));
    REQUIRE(f.read_bits(out) == count);
  }
}

TEST_CASE("equality") {
  Fixture f;
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t c = 0; c < 16; ++c) {
      REQUIRE(f.read(she_equal(f.b, encrypt_bits(f.b, a, 4, f.rng), encrypt_bits(f.b, c, 4, f.rng))) == (a == c));
    }
  }
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      CHECK(f.read(she_equal(f.b, encrypt_bits(f.b, a, 1, f.rng), encrypt_bits(f.b, c, 1, f.rng))) == (a == c));
    }
  }
}

TEST_CASE("rank selection circuit") {
  SUBCASE("worked example") {
    Fixture f(3, 8);
    std::vector<std::vector<SlotCiphertext>> X;
    std::vector<SlotCiphertext> Z;
    for (std::uint64_t v : {5, 1, 3}) {
      X.push_back(encrypt_bits(f.b, v, 3, f.rng));
      Z.push_back(encrypt_packed(f.b, v, 3, f.rng));
    }
    const auto out = compute_kre_she(f.b, X, Z, encrypt_bits(f.b, 2, 2, f.rng));
    CHECK(decode_packed(f.b.peek(out), 3) == 3);
    CHECK_THROWS_AS(compute_kre_she(f.b, X, Z, encrypt_bits(f.b, 2, 3, f.rng)), ConfigError);
  }
  SUBCASE("random instances, depth and serial/parallel agreement") {
    Prng rng = Prng::from_seed(22, "test-she-kre");
    for (int trial = 0; trial < 50; ++trial) {
      const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.uniform(5));
      const unsigned mu = 8, w = mu + core::ceil_log2(n);
      const auto keys = debug_keygen(n, default_slot_count(w), w + n + 1, rng);
      const auto& b = *keys.context;
      std::vector<core::PlainInput> plain;
      std::vector<std::vector<SlotCiphertext>> X;
      std::vector<SlotCiphertext> Z;
      for (std::uint32_t i = 1; i <= n; ++i) {
        plain.push_back({rng.uniform(1u << mu), i});
        const auto x = core::make_distinct(plain.back(), n, mu).value;
        X.push_back(encrypt_bits(b, x, w, rng));
        Z.push_back(encrypt_packed(b, x, w, rng));
      }
      const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.uniform(n));
      const auto kb = encrypt_bits(b, k, core::ceil_log2(n + 1), rng);
      const auto par = compute_kre_she(b, X, Z, kb, Exec::Parallel);
      const auto ser = compute_kre_she(b, X, Z, kb, Exec::Serial);
      CHECK(b.serialize(par) == b.serialize(ser));
      REQUIRE(core::strip_index(decode_packed(b.peek(par), w), n) == core::kre_oracle(plain, k));
      CHECK(par.depth == kre_depth_oracle(w, n));
      CHECK(par.depth == w + std::bit_ceil(n + 1) / 2 + 1);
      CHECK(par.depth <= b.depth_budget());
    }
  }
}

TEST_CASE("n-out-of-n decryption") {
  Fixture f(4);
  const auto s = f.random_slots();
  const auto c = f.b.encrypt(s, f.rng);
  CHECK(she_threshold_decrypt(f.b, c, f.keys.shares, 4) == s);
  const std::vector<SheKeyShare> three(f.keys.shares.begin(), f.keys.shares.begin() + 3);
  CHECK_THROWS_AS(she_threshold_decrypt(f.b, c, three, 4), ThresholdFailure);

  const Bytes wire = f.b.serialize(c);
  CHECK(f.b.peek(f.b.deserialize(wire)) == s);
  std::vector<PartialResult> parts;
  for (const auto& sh : f.keys.shares) parts.push_back(deserialize_partial(serialize_partial(partial_decrypt(sh, wire))));
  CHECK(combine(wire, parts, 4) == s);
  std::reverse(parts.begin(), parts.end());
  CHECK(combine(wire, parts, 4) == s);
  std::swap(parts[0], parts[2]);
  CHECK(combine(wire, parts, 4) == s);
  parts[1] = parts[0];
  CHECK_THROWS_AS(combine(wire, parts, 4), CryptoError);

  // A wire ciphertext alone does not reveal the slots to someone missing a share.
  std::vector<PartialResult> fewer;
  for (std::size_t i = 0; i < 3; ++i) fewer.push_back(partial_decrypt(f.keys.shares[i], wire));
  CHECK_THROWS_AS(combine(wire, fewer, 4), ThresholdFailure);
}

TEST_CASE("packed encoding") {
  Fixture f(2, 16);
  CHECK(decode_packed(f.b.peek(encrypt_packed(f.b, 0x2A5, 12, f.rng)), 12) == 0x2A5);
  CHECK_THROWS_AS(encrypt_packed(f.b, 1, 17, f.rng), ConfigError);
  CHECK(default_slot_count(11) == 16);
  CHECK(default_slot_count(16) == 16);
}

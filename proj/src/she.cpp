#include "skre/she.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <string>

#include "skre/core.hpp"
#include "skre/errors.hpp"

namespace skre::she {
namespace {

inline constexpr std::uint8_t kDebugTag = 0xD5;
inline constexpr std::size_t kMaxSlots = 64;

std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t op) {
  std::uint64_t z = a ^ std::rotl(b, 23) ^ (op * 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Slot j of the mask is parity(key AND H_j(nonce)), linear in the key.
std::vector<std::uint8_t> key_mask(const std::uint64_t key[2], std::uint32_t context_id, std::uint64_t nonce, std::size_t slots) {
  Prng::Key root{};
  Prng h(derive_key(root, "skre-she-mask", {context_id, nonce}));
  std::vector<std::uint8_t> out(slots);
  for (std::size_t j = 0; j < slots; ++j) {
    const std::uint64_t h0 = h.next_u64();
    const std::uint64_t h1 = h.next_u64();
    out[j] = static_cast<std::uint8_t>(std::popcount((key[0] & h0) ^ (key[1] & h1)) & 1);
  }
  return out;
}

struct WireHeader {
  std::uint32_t context_id;
  std::uint32_t slots;
  std::uint32_t depth;
  std::uint64_t nonce;
  std::vector<std::uint8_t> masked;
};

WireHeader parse_wire(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u8() != kDebugTag) throw WireError("SHE ciphertext: unknown backend tag");
  WireHeader h;
  h.context_id = r.u32();
  h.slots = r.u16();
  h.depth = r.u16();
  h.nonce = r.u64();
  if (h.slots == 0 || h.slots > kMaxSlots) throw WireError("SHE ciphertext: bad slot count");
  auto bitmap = r.raw((h.slots + 7) / 8);
  r.expect_end();
  h.masked.resize(h.slots);
  for (std::size_t j = 0; j < h.slots; ++j) h.masked[j] = (bitmap[j / 8] >> (7 - j % 8)) & 1;
  return h;
}

SlotCiphertext ladder_greater(const SlotBackend& b, std::span<const SlotCiphertext> x, std::span<const SlotCiphertext> y) {
  const std::size_t w = x.size();
  // c_l = x_l ^ ((x_l ^ c_{l-1}) & (y_l ^ c_{l-1})), c_0 = 0, least significant bit first.
  SlotCiphertext c = b.add(x[w - 1], b.mult(x[w - 1], y[w - 1]));
  for (std::size_t l = 2; l <= w; ++l) {
    const SlotCiphertext& xl = x[w - l];
    const SlotCiphertext& yl = y[w - l];
    c = b.add(xl, b.mult(b.add(xl, c), b.add(yl, c)));
  }
  return c;
}

}  // namespace

DebugBackend::DebugBackend(std::uint32_t context_id, std::size_t slots, std::uint32_t depth_budget, std::uint64_t key0,
                           std::uint64_t key1)
    : id_(context_id), slots_(slots), budget_(depth_budget), key_{key0, key1} {
  if (slots == 0 || slots > kMaxSlots) throw ConfigError("debug SHE backend supports 1..64 slots");
}

void DebugBackend::check_same(const SlotCiphertext& a, const SlotCiphertext& b) const {
  if (a.context_id != id_ || b.context_id != id_) throw CryptoError("SHE context mismatch");
  if (a.body.size() != 1 || b.body.size() != 1) throw CryptoError("malformed debug ciphertext");
}

SlotCiphertext DebugBackend::encrypt(std::span<const std::uint8_t> slots, Prng& rng) const {
  if (slots.size() > slots_) throw ConfigError("more plaintext bits than slots");
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < slots.size(); ++j) {
    if (slots[j] > 1) throw ConfigError("slot plaintexts are bits");
    bits |= std::uint64_t{slots[j]} << j;
  }
  return {id_, static_cast<std::uint32_t>(slots_), 0, rng.next_u64(), {bits}};
}

SlotCiphertext DebugBackend::constant(bool value) const {
  const std::uint64_t all = slots_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << slots_) - 1;
  return {id_, static_cast<std::uint32_t>(slots_), 0, mix(id_, value, 1), {value ? all : 0}};
}

SlotCiphertext DebugBackend::add(const SlotCiphertext& a, const SlotCiphertext& b) const {
  check_same(a, b);
  return {id_, a.slots, std::max(a.depth, b.depth), mix(a.nonce, b.nonce, 2), {a.body[0] ^ b.body[0]}};
}

SlotCiphertext DebugBackend::mult(const SlotCiphertext& a, const SlotCiphertext& b) const {
  check_same(a, b);
  const std::uint32_t depth = std::max(a.depth, b.depth) + 1;
  if (depth > budget_) {
    throw CryptoError("multiplicative depth " + std::to_string(depth) + " exceeds budget " + std::to_string(budget_));
  }
  return {id_, a.slots, depth, mix(a.nonce, b.nonce, 3), {a.body[0] & b.body[0]}};
}

Bytes DebugBackend::serialize(const SlotCiphertext& c) const {
  if (c.context_id != id_ || c.body.size() != 1) throw CryptoError("SHE context mismatch");
  const auto mask = key_mask(key_, id_, c.nonce, slots_);
  ByteWriter w;
  w.u8(kDebugTag);
  w.u32(id_);
  w.u16(static_cast<std::uint16_t>(slots_));
  w.u16(static_cast<std::uint16_t>(c.depth));
  w.u64(c.nonce);
  Bytes bitmap((slots_ + 7) / 8, 0);
  for (std::size_t j = 0; j < slots_; ++j) {
    const std::uint8_t bit = static_cast<std::uint8_t>(((c.body[0] >> j) & 1) ^ mask[j]);
    bitmap[j / 8] |= static_cast<std::uint8_t>(bit << (7 - j % 8));
  }
  w.raw(bitmap);
  return w.take();
}

SlotCiphertext DebugBackend::deserialize(std::span<const std::uint8_t> bytes) const {
  const WireHeader h = parse_wire(bytes);
  if (h.context_id != id_ || h.slots != slots_) throw CryptoError("SHE context mismatch");
  const auto mask = key_mask(key_, id_, h.nonce, slots_);
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < slots_; ++j) bits |= std::uint64_t(h.masked[j] ^ mask[j]) << j;
  return {id_, h.slots, h.depth, h.nonce, {bits}};
}

std::vector<std::uint8_t> DebugBackend::peek(const SlotCiphertext& c) const {
  if (c.context_id != id_ || c.body.size() != 1) throw CryptoError("SHE context mismatch");
  std::vector<std::uint8_t> out(slots_);
  for (std::size_t j = 0; j < slots_; ++j) out[j] = (c.body[0] >> j) & 1;
  return out;
}

std::size_t default_slot_count(unsigned mu_prime) {
  if (mu_prime == 0 || mu_prime > kMaxSlots) throw ConfigError("mu' must lie in [1, 64] for the SHE backend");
  return std::bit_ceil(std::size_t{mu_prime});
}

SheKeyMaterial debug_keygen(std::uint32_t n, std::size_t slots, std::uint32_t depth_budget, Prng& rng) {
  if (n == 0) throw ConfigError("SHE keygen needs at least one share holder");
  SheKeyMaterial km;
  std::uint64_t master[2] = {0, 0};
  for (std::uint32_t i = 1; i <= n; ++i) {
    SheKeyShare s;
    s.index = i;
    s.key[0] = rng.next_u64();
    s.key[1] = rng.next_u64();
    master[0] ^= s.key[0];
    master[1] ^= s.key[1];
    km.shares.push_back(s);
  }
  const auto id = static_cast<std::uint32_t>(rng.next_u64());
  km.context = std::make_shared<DebugBackend>(id, slots, depth_budget, master[0], master[1]);
  return km;
}

PartialResult partial_decrypt(const SheKeyShare& share, std::span<const std::uint8_t> wire_ciphertext) {
  const WireHeader h = parse_wire(wire_ciphertext);
  return {share.index, h.nonce, key_mask(share.key, h.context_id, h.nonce, h.slots)};
}

std::vector<std::uint8_t> combine(std::span<const std::uint8_t> wire_ciphertext, std::span<const PartialResult> partials,
                                  std::uint32_t n) {
  const WireHeader h = parse_wire(wire_ciphertext);
  if (partials.size() != n) {
    throw ThresholdFailure("SHE decryption needs all " + std::to_string(n) + " partial results, got " +
                           std::to_string(partials.size()));
  }
  std::vector<bool> seen(n + 1, false);
  std::vector<std::uint8_t> out = h.masked;
  for (const auto& p : partials) {
    if (p.index < 1 || p.index > n || seen[p.index]) throw CryptoError("SHE partial results: bad or duplicate index");
    seen[p.index] = true;
    if (p.nonce != h.nonce || p.mask.size() != h.slots) throw CryptoError("SHE partial result does not match ciphertext");
    for (std::size_t j = 0; j < out.size(); ++j) out[j] ^= p.mask[j];
  }
  return out;
}

std::vector<std::uint8_t> she_threshold_decrypt(const SlotBackend& backend, const SlotCiphertext& c,
                                                std::span<const SheKeyShare> shares, std::uint32_t n) {
  const Bytes wire = backend.serialize(c);
  std::vector<PartialResult> partials;
  for (const auto& s : shares) partials.push_back(partial_decrypt(s, wire));
  return combine(wire, partials, n);
}

Bytes serialize_partial(const PartialResult& p) {
  ByteWriter w;
  w.u32(p.index);
  w.u64(p.nonce);
  w.u16(static_cast<std::uint16_t>(p.mask.size()));
  for (auto b : p.mask) w.u8(b);
  return w.take();
}

PartialResult deserialize_partial(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  PartialResult p;
  p.index = r.u32();
  p.nonce = r.u64();
  const std::uint16_t slots = r.u16();
  if (slots == 0 || slots > kMaxSlots) throw WireError("SHE partial result: bad slot count");
  for (std::uint16_t j = 0; j < slots; ++j) {
    const std::uint8_t b = r.u8();
    if (b > 1) throw WireError("SHE partial result: mask entries are bits");
    p.mask.push_back(b);
  }
  r.expect_end();
  return p;
}

// ---- routines ----

SlotCiphertext she_add(const SlotBackend& b, const SlotCiphertext& x, const SlotCiphertext& y) { return b.add(x, y); }

SlotCiphertext she_add(const SlotBackend& b, std::span<const SlotCiphertext> xs) {
  if (xs.empty()) return b.constant(false);
  SlotCiphertext acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) acc = b.add(acc, xs[i]);
  return acc;
}

SlotCiphertext she_mult(const SlotBackend& b, const SlotCiphertext& x, const SlotCiphertext& y) { return b.mult(x, y); }

std::pair<SlotCiphertext, SlotCiphertext> she_cmp(const SlotBackend& b, std::span<const SlotCiphertext> xi,
                                                  std::span<const SlotCiphertext> xj) {
  if (xi.size() != xj.size() || xi.empty()) throw ConfigError("she_cmp: width mismatch");
  return {ladder_greater(b, xi, xj), ladder_greater(b, xj, xi)};
}

std::vector<SlotCiphertext> she_fadder(const SlotBackend& b, std::span<const SlotCiphertext> bits) {
  if (bits.empty()) throw ConfigError("she_fadder: no inputs");
  const unsigned width = core::ceil_log2(bits.size() + 1);
  const std::size_t top = std::size_t{1} << (width - 1);
  // Bit k of the popcount is the elementary symmetric polynomial e_{2^k} mod 2.
  // e[d] is empty until at least d inputs have been absorbed.
  std::vector<std::optional<SlotCiphertext>> e(top + 1);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    for (std::size_t d = std::min(top, i + 1); d >= 2; --d) {
      if (!e[d - 1]) continue;
      SlotCiphertext term = b.mult(bits[i], *e[d - 1]);
      e[d] = e[d] ? b.add(*e[d], term) : term;
    }
    e[1] = e[1] ? b.add(*e[1], bits[i]) : bits[i];
  }
  std::vector<SlotCiphertext> out;
  for (unsigned k = width; k-- > 0;) {
    const auto& ek = e[std::size_t{1} << k];
    out.push_back(ek ? *ek : b.constant(false));
  }
  return out;
}

SlotCiphertext she_equal(const SlotBackend& b, std::span<const SlotCiphertext> x, std::span<const SlotCiphertext> y) {
  auto [gt, lt] = she_cmp(b, x, y);
  return b.add(b.add(gt, lt), b.constant(true));
}

SlotCiphertext compute_kre_she(const SlotBackend& b, const std::vector<std::vector<SlotCiphertext>>& X,
                               std::span<const SlotCiphertext> Z, std::span<const SlotCiphertext> k_bits, Exec exec) {
  const std::size_t n = X.size();
  if (n == 0 || Z.size() != n) throw ConfigError("compute_kre_she: X and Z must both hold n entries");
  const std::size_t w = X[0].size();
  for (const auto& xi : X) {
    if (xi.size() != w || w == 0) throw ConfigError("compute_kre_she: inconsistent bit widths");
  }
  if (k_bits.size() != core::ceil_log2(n + 1)) throw ConfigError("compute_kre_she: rank has wrong width");

  std::vector<std::vector<SlotCiphertext>> B(n, std::vector<SlotCiphertext>(n));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    B[i][i] = b.constant(true);
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), exec, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    auto [gt, lt] = she_cmp(b, X[i], X[j]);
    B[i][j] = std::move(gt);
    B[j][i] = std::move(lt);
  });
  std::vector<SlotCiphertext> y(n);
  parallel_for(n, exec, [&](std::size_t i) {
    const auto rank = she_fadder(b, B[i]);
    y[i] = b.mult(Z[i], she_equal(b, rank, k_bits));
  });
  return she_add(b, y);
}

std::vector<SlotCiphertext> encrypt_bits(const SlotBackend& b, std::uint64_t value, unsigned width, Prng& rng) {
  const core::BitVector bits = core::BitVector::of(value, width);
  std::vector<SlotCiphertext> out;
  for (auto bit : bits.bits) {
    const std::vector<std::uint8_t> slots(b.slot_count(), bit);
    out.push_back(b.encrypt(slots, rng));
  }
  return out;
}

SlotCiphertext encrypt_packed(const SlotBackend& b, std::uint64_t value, unsigned width, Prng& rng) {
  if (width > b.slot_count()) throw ConfigError("packed value wider than the slot count");
  const core::BitVector bits = core::BitVector::of(value, width);
  return b.encrypt(bits.bits, rng);
}

std::uint64_t decode_packed(std::span<const std::uint8_t> slots, unsigned width) {
  if (width > slots.size() || width > 64) throw ConfigError("decode_packed: width exceeds slot count");
  std::uint64_t v = 0;
  for (unsigned j = 0; j < width; ++j) v = (v << 1) | (slots[j] & 1);
  return v;
}

}  // namespace skre::she

#include "skre/garble.hpp"

#include <openssl/evp.h>

#include <string>

#include "skre/errors.hpp"
#include "skre/hash.hpp"
#include "skre/prng.hpp"

namespace skre::garble {
namespace {

void check_lambda(unsigned lambda) {
  if (lambda != 80 && lambda != 128) throw ConfigError("lambda must be 80 or 128");
}

void mask(WireLabel& l, unsigned lambda) {
  for (std::size_t i = lambda / 8; i < l.bytes.size(); ++i) l.bytes[i] = 0;
}

// Fixed-key AES permutation shared by garbler and evaluator.
class FixedKeyAes {
 public:
  FixedKeyAes() {
    static const std::uint8_t kKey[16] = {0x61, 0x3b, 0x0e, 0x95, 0x2f, 0xd4, 0x77, 0xc1,
                                          0x08, 0x5a, 0xe6, 0x19, 0xb3, 0x4c, 0x90, 0x2d};
    ctx_ = EVP_CIPHER_CTX_new();
    if (!ctx_ || EVP_EncryptInit_ex(ctx_, EVP_aes_128_ecb(), nullptr, kKey, nullptr) != 1) {
      throw CryptoError("fixed-key AES initialisation failed");
    }
    EVP_CIPHER_CTX_set_padding(ctx_, 0);
  }
  ~FixedKeyAes() { EVP_CIPHER_CTX_free(ctx_); }

  std::array<std::uint8_t, 16> apply(const std::array<std::uint8_t, 16>& in) {
    std::array<std::uint8_t, 16> out{};
    int len = 0;
    if (EVP_EncryptUpdate(ctx_, out.data(), &len, in.data(), 16) != 1 || len != 16) throw CryptoError("AES block failed");
    return out;
  }

 private:
  EVP_CIPHER_CTX* ctx_ = nullptr;
};

// H(X, j) = pi(2X ^ j) ^ 2X ^ j, doubling in GF(2^128), truncated to lambda bits.
WireLabel hash(const WireLabel& x, std::uint64_t tweak, unsigned lambda) {
  thread_local FixedKeyAes aes;
  std::array<std::uint8_t, 16> k{};
  const bool carry = x.bytes[0] & 0x80;
  for (int i = 0; i < 15; ++i) k[i] = static_cast<std::uint8_t>((x.bytes[i] << 1) | (x.bytes[i + 1] >> 7));
  k[15] = static_cast<std::uint8_t>(x.bytes[15] << 1);
  if (carry) k[15] ^= 0x87;
  for (int i = 0; i < 8; ++i) k[8 + i] ^= static_cast<std::uint8_t>(tweak >> (56 - 8 * i));
  const auto p = aes.apply(k);
  WireLabel out;
  for (int i = 0; i < 16; ++i) out.bytes[i] = p[i] ^ k[i];
  mask(out, lambda);
  return out;
}

WireLabel random_label(Prng& rng, unsigned lambda) {
  WireLabel l;
  rng.fill(l.bytes);
  mask(l, lambda);
  return l;
}

std::size_t value_wire(unsigned mu_prime, unsigned l) { return 1 + (mu_prime - l); }

}  // namespace

WireLabel WireLabel::operator^(const WireLabel& o) const {
  WireLabel r = *this;
  r ^= o;
  return r;
}

WireLabel& WireLabel::operator^=(const WireLabel& o) {
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] ^= o.bytes[i];
  return *this;
}

WireLabel InputEncoding::label(Side side, std::size_t wire, bool value) const {
  const auto& zeros = side == Side::Generator ? generator_zero : evaluator_zero;
  if (wire >= zeros.size()) throw ConfigError("input wire out of range");
  return value ? zeros[wire] ^ delta : zeros[wire];
}

std::size_t label_wire_bytes(unsigned lambda) { return lambda / 8; }

void write_label(ByteWriter& w, const WireLabel& l, unsigned lambda) {
  w.raw(std::span(l.bytes).first(label_wire_bytes(lambda)));
}

WireLabel read_label(ByteReader& r, unsigned lambda) {
  check_lambda(lambda);
  WireLabel l;
  auto b = r.raw(label_wire_bytes(lambda));
  std::copy(b.begin(), b.end(), l.bytes.begin());
  return l;
}

SharedSeed dh_seed(const aheg::Scalar& own_secret, const aheg::Point& peer_public, unsigned lambda) {
  check_lambda(lambda);
  if (peer_public.is_identity()) throw CryptoError("peer DH value is the identity");
  const aheg::Point shared = peer_public * own_secret;
  if (shared.is_identity()) throw CryptoError("degenerate DH shared point");
  const Digest d = Sha256().update("skre-dh-seed").update(shared.to_bytes()).finish();
  SharedSeed s;
  s.lambda = lambda;
  std::copy_n(d.begin(), lambda / 8, s.key.begin());
  return s;
}

Garbling garble(const SharedSeed& seed, unsigned mu_prime, unsigned lambda) {
  check_lambda(lambda);
  if (mu_prime < 1 || mu_prime > core::kMaxMuPrime + 24) throw ConfigError("garble: mu' out of range");
  Prng::Key root{};
  std::copy(seed.key.begin(), seed.key.end(), root.begin());
  Prng rng(derive_key(root, "skre-garble", {mu_prime, lambda}));

  Garbling g;
  InputEncoding& e = g.encoding;
  e.mu_prime = mu_prime;
  e.lambda = lambda;
  e.delta = random_label(rng, lambda);
  e.delta.bytes[0] |= 1;
  for (unsigned w = 0; w <= mu_prime; ++w) e.generator_zero.push_back(random_label(rng, lambda));
  for (unsigned w = 0; w <= mu_prime; ++w) e.evaluator_zero.push_back(random_label(rng, lambda));

  GarbledComparator& f = g.circuit;
  f.mu_prime = mu_prime;
  f.lambda = lambda;
  f.rows.reserve(kRowsPerAndGate * mu_prime);
  const WireLabel& delta = e.delta;

  WireLabel carry;  // zero-label of c_{l-1}; c_0 = 1 is folded into the first stage
  for (unsigned l = 1; l <= mu_prime; ++l) {
    const WireLabel& x0 = e.generator_zero[value_wire(mu_prime, l)];
    const WireLabel& y0 = e.evaluator_zero[value_wire(mu_prime, l)];
    // x XOR c and y XOR c; with c = 1 this is a free NOT, i.e. the zero-label flips by delta.
    const WireLabel a0 = l == 1 ? x0 ^ delta : x0 ^ carry;
    const WireLabel b0 = l == 1 ? y0 ^ delta : y0 ^ carry;
    const std::uint64_t j0 = 2ull * (l - 1);
    const std::uint64_t j1 = j0 + 1;
    const bool pa = a0.color();
    const bool pb = b0.color();

    const WireLabel ha0 = hash(a0, j0, lambda);
    const WireLabel ha1 = hash(a0 ^ delta, j0, lambda);
    const WireLabel hb0 = hash(b0, j1, lambda);
    const WireLabel hb1 = hash(b0 ^ delta, j1, lambda);

    WireLabel tg = ha0 ^ ha1;
    if (pb) tg ^= delta;
    WireLabel wg = ha0;
    if (pa) wg ^= tg;

    const WireLabel te = hb0 ^ hb1 ^ a0;
    WireLabel we = hb0;
    if (pb) we ^= te ^ a0;

    f.rows.push_back(tg);
    f.rows.push_back(te);
    carry = x0 ^ wg ^ we;
  }
  const WireLabel out0 = carry ^ e.generator_zero[0] ^ e.evaluator_zero[0];
  f.decode_bit = out0.color();
  return g;
}

std::vector<WireLabel> encode(const InputEncoding& e, Side side, bool blind, const core::BitVector& x) {
  if (x.size() != e.mu_prime) {
    throw ConfigError("encode: input has " + std::to_string(x.size()) + " bits, circuit expects " + std::to_string(e.mu_prime));
  }
  std::vector<WireLabel> out;
  out.reserve(e.mu_prime + 1);
  out.push_back(e.label(side, 0, blind));
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(e.label(side, 1 + i, x.bits[i] != 0));
  return out;
}

bool evaluate(const GarbledComparator& f, std::span<const WireLabel> generator_input,
              std::span<const WireLabel> evaluator_input) {
  const unsigned mu_prime = f.mu_prime;
  if (generator_input.size() != mu_prime + 1u || evaluator_input.size() != mu_prime + 1u) {
    throw ConfigError("evaluate: garbled input width mismatch");
  }
  if (f.rows.size() != kRowsPerAndGate * mu_prime) throw WireError("evaluate: garbled table has wrong size");
  WireLabel carry;
  for (unsigned l = 1; l <= mu_prime; ++l) {
    const WireLabel& x = generator_input[value_wire(mu_prime, l)];
    const WireLabel& y = evaluator_input[value_wire(mu_prime, l)];
    const WireLabel a = l == 1 ? x : x ^ carry;
    const WireLabel b = l == 1 ? y : y ^ carry;
    const std::uint64_t j0 = 2ull * (l - 1);
    const WireLabel& tg = f.rows[2 * (l - 1)];
    const WireLabel& te = f.rows[2 * (l - 1) + 1];
    WireLabel wg = hash(a, j0, f.lambda);
    if (a.color()) wg ^= tg;
    WireLabel we = hash(b, j0 + 1, f.lambda);
    if (b.color()) we ^= te ^ a;
    carry = x ^ wg ^ we;
  }
  const WireLabel out = carry ^ generator_input[0] ^ evaluator_input[0];
  return out.color() != f.decode_bit;
}

Bytes GarbledComparator::serialize() const {
  ByteWriter w;
  w.u8(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(mu_prime));
  w.u32(static_cast<std::uint32_t>(and_gates()));
  w.u16(static_cast<std::uint16_t>(lambda));
  w.u8(decode_bit ? 1 : 0);
  for (const auto& row : rows) write_label(w, row, lambda);
  return w.take();
}

GarbledComparator GarbledComparator::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u8() != kFormatVersion) throw WireError("garbled circuit: unsupported version");
  GarbledComparator f;
  f.mu_prime = r.u16();
  const std::uint32_t gates = r.u32();
  f.lambda = r.u16();
  if (f.lambda != 80 && f.lambda != 128) throw WireError("garbled circuit: bad lambda");
  if (gates != f.mu_prime || f.mu_prime == 0) throw WireError("garbled circuit: gate count does not match mu'");
  const std::uint8_t d = r.u8();
  if (d > 1) throw WireError("garbled circuit: bad decode bit");
  f.decode_bit = d == 1;
  f.rows.reserve(kRowsPerAndGate * gates);
  for (std::size_t i = 0; i < kRowsPerAndGate * gates; ++i) f.rows.push_back(read_label(r, f.lambda));
  r.expect_end();
  return f;
}

}  // namespace skre::garble

#include "skre/compare.hpp"

#include "skre/errors.hpp"

namespace skre::compare {

using aheg::Point;
using aheg::Scalar;

EncryptedEncoding encrypt_encoding(const Point& pk, const core::ZeroOneEncoding& e, Prng& rng) {
  EncryptedEncoding out;
  out.v0.reserve(e.v0.size());
  out.v1.reserve(e.v1.size());
  for (auto v : e.v0) out.v0.push_back(aheg::encrypt(pk, v, rng));
  for (auto v : e.v1) out.v1.push_back(aheg::encrypt(pk, v, rng));
  return out;
}

LinCompareRandomness LinCompareRandomness::draw(std::size_t width, Prng& rng) {
  LinCompareRandomness r;
  r.multipliers.reserve(width);
  for (std::size_t l = 0; l < width; ++l) r.multipliers.push_back(Scalar::random_nonzero(rng));
  r.permutation = rng.permutation(width);
  return r;
}

std::vector<AheCiphertext> lin_compare_with(std::span<const AheCiphertext> v1_i, std::span<const AheCiphertext> v0_j,
                                            const LinCompareRandomness& rnd) {
  if (v1_i.size() != v0_j.size()) throw ConfigError("lin_compare: encodings differ in length");
  if (rnd.multipliers.size() != v1_i.size() || rnd.permutation.size() != v1_i.size()) {
    throw ConfigError("lin_compare: randomness does not match encoding length");
  }
  std::vector<AheCiphertext> out(v1_i.size());
  for (std::size_t l = 0; l < v1_i.size(); ++l) {
    out[rnd.permutation[l]] = aheg::scalar_mul(aheg::sub(v1_i[l], v0_j[l]), rnd.multipliers[l]);
  }
  return out;
}

std::vector<AheCiphertext> lin_compare(std::span<const AheCiphertext> v1_i, std::span<const AheCiphertext> v0_j, Prng& rng) {
  if (v1_i.size() != v0_j.size()) throw ConfigError("lin_compare: encodings differ in length");
  return lin_compare_with(v1_i, v0_j, LinCompareRandomness::draw(v1_i.size(), rng));
}

DgkEvaluation dgk_eva_with_delta(const Point& pk_i, std::span<const AheCiphertext> enc_bits_i, const core::BitVector& x_j,
                                 bool delta, Prng& rng) {
  const std::size_t w = enc_bits_i.size();
  if (w != x_j.size() || w == 0) throw ConfigError("dgk_eva: bit-width mismatch");
  const Scalar s = Scalar::from_i64(delta ? -1 : 1);

  // Walk from the most significant bit down; `prefix` holds 3 * sum_{v > u} (x_iv XOR x_jv).
  std::vector<AheCiphertext> z;
  z.reserve(w);
  AheCiphertext prefix;
  for (std::size_t idx = 0; idx < w; ++idx) {
    const bool xj = x_j.bits[idx] != 0;
    AheCiphertext zu = aheg::add_plain(aheg::add(prefix, enc_bits_i[idx]), s - Scalar::from_u64(xj ? 1 : 0));
    zu = aheg::scalar_mul(zu, Scalar::random_nonzero(rng));
    z.push_back(aheg::rerandomize(zu, pk_i, rng));
    const AheCiphertext diff = aheg::xor_plain(enc_bits_i[idx], xj, pk_i, rng);
    prefix = aheg::add(prefix, aheg::add(diff, aheg::add(diff, diff)));
  }
  const auto perm = rng.permutation(w);
  DgkEvaluation out{delta, std::vector<AheCiphertext>(w)};
  for (std::size_t u = 0; u < w; ++u) out.z[perm[u]] = std::move(z[u]);
  return out;
}

DgkEvaluation dgk_eva(const Point& pk_i, std::span<const AheCiphertext> enc_bits_i, const core::BitVector& x_j, Prng& rng) {
  const bool delta = rng.bit();
  return dgk_eva_with_delta(pk_i, enc_bits_i, x_j, delta, rng);
}

bool dgk_dec(std::span<const AheCiphertext> z, const Scalar& sk_i) {
  bool any = false;
  for (const auto& c : z) any |= aheg::is_zero(aheg::decrypt(sk_i, c));
  return any;
}

DgkReply dgk_evaluator_step(const Point& pk_i, const Point& common_pk, std::span<const AheCiphertext> enc_bits_i,
                            const core::BitVector& x_j, Prng& rng) {
  DgkEvaluation ev = dgk_eva(pk_i, enc_bits_i, x_j, rng);
  const bool share = normalized_evaluator_share(ev.delta);
  return {std::move(ev.z), aheg::encrypt(common_pk, share ? 1 : 0, rng)};
}

AheCiphertext dgk_generator_step(const DgkReply& reply, const Scalar& sk_i, const Point& common_pk, Prng& rng) {
  return aheg::xor_plain(reply.share, dgk_dec(reply.z, sk_i), common_pk, rng);
}

DgkTranscript dgk_compare_local(const aheg::AheKeyPair& generator_key, const Point& common_pk, const core::BitVector& x_i,
                                const core::BitVector& x_j, Prng& generator_rng, Prng& evaluator_rng) {
  if (x_i.size() != x_j.size()) throw ConfigError("dgk_compare: bit-width mismatch");
  DgkTranscript t;
  std::vector<AheCiphertext> bits;
  for (auto b : x_i.bits) bits.push_back(aheg::encrypt(generator_key.pk, b, generator_rng));
  ++t.server_routed_messages;  // server forwards the generator's bits to the evaluator
  const DgkReply reply = dgk_evaluator_step(generator_key.pk, common_pk, bits, x_j, evaluator_rng);
  t.server_routed_messages += 2;  // evaluator -> server -> generator
  t.result = dgk_generator_step(reply, generator_key.sk, common_pk, generator_rng);
  ++t.server_routed_messages;  // generator -> server
  return t;
}

}  // namespace skre::compare

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skre/aheg.hpp"
#include "skre/core.hpp"
#include "skre/prng.hpp"

namespace skre::compare {

using aheg::AheCiphertext;

// Componentwise encryptions of a 0/1-encoding; same position layout as ZeroOneEncoding.
struct EncryptedEncoding {
  std::vector<AheCiphertext> v0;
  std::vector<AheCiphertext> v1;
};

EncryptedEncoding encrypt_encoding(const aheg::Point& pk, const core::ZeroOneEncoding& e, Prng& rng);

// Multipliers r_l in [1, p) and the output shuffle for one LinCompare call.
struct LinCompareRandomness {
  std::vector<aheg::Scalar> multipliers;
  std::vector<std::size_t> permutation;

  static LinCompareRandomness draw(std::size_t width, Prng& rng);
};

// out[perm[l]] = r_l * (u_l - v_l). Exactly one output decrypts to zero iff x_i > x_j.
std::vector<AheCiphertext> lin_compare(std::span<const AheCiphertext> v1_i, std::span<const AheCiphertext> v0_j, Prng& rng);
std::vector<AheCiphertext> lin_compare_with(std::span<const AheCiphertext> v1_i, std::span<const AheCiphertext> v0_j,
                                            const LinCompareRandomness& rnd);

// Bits held after one DGK comparison. `evaluator` is already normalised, so
// generator XOR evaluator = [x_i >= x_j] for distinct inputs.
struct DgkShare {
  bool generator = false;
  bool evaluator = false;
  bool bit() const { return generator != evaluator; }
};

struct DgkEvaluation {
  bool delta = false;              // raw evaluator bit delta_ji
  std::vector<AheCiphertext> z;    // permuted, under the generator's personal key
};

// Evaluator side. enc_bits_i are the generator's bits (most significant first) under pk_i.
DgkEvaluation dgk_eva(const aheg::Point& pk_i, std::span<const AheCiphertext> enc_bits_i, const core::BitVector& x_j, Prng& rng);
DgkEvaluation dgk_eva_with_delta(const aheg::Point& pk_i, std::span<const AheCiphertext> enc_bits_i,
                                 const core::BitVector& x_j, bool delta, Prng& rng);

// Generator side: 1 iff some z_u decrypts to zero.
bool dgk_dec(std::span<const AheCiphertext> z, const aheg::Scalar& sk_i);

// Raw shares XOR to [x_i <= x_j]; flipping the evaluator share yields [x_i >= x_j].
inline bool normalized_evaluator_share(bool delta_ji) { return !delta_ji; }

// Message sent evaluator -> generator: Z plus the normalised share under the common key.
struct DgkReply {
  std::vector<AheCiphertext> z;
  AheCiphertext share;
};

DgkReply dgk_evaluator_step(const aheg::Point& pk_i, const aheg::Point& common_pk, std::span<const AheCiphertext> enc_bits_i,
                            const core::BitVector& x_j, Prng& rng);
// Returns Enc_common([x_i >= x_j]).
AheCiphertext dgk_generator_step(const DgkReply& reply, const aheg::Scalar& sk_i, const aheg::Point& common_pk, Prng& rng);

// Whole comparison in one process, hop by hop as the server would route it.
struct DgkTranscript {
  AheCiphertext result;
  std::size_t server_routed_messages = 0;
};
DgkTranscript dgk_compare_local(const aheg::AheKeyPair& generator_key, const aheg::Point& common_pk, const core::BitVector& x_i,
                                const core::BitVector& x_j, Prng& generator_rng, Prng& evaluator_rng);

}  // namespace skre::compare

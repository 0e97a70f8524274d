#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skre/aheg.hpp"
#include "skre/compare.hpp"
#include "skre/garble.hpp"
#include "skre/parallel.hpp"

// Batch kernels behind the protocols' O(n^2) steps. Randomness is always drawn by the
// caller before the call, so Exec::Serial and Exec::Parallel return identical bytes.
namespace skre::kernels {

using aheg::AheCiphertext;

struct OrderedPair {
  std::size_t row = 0;  // 0-based
  std::size_t col = 0;
};

// out[p] = lin_compare(enc[pairs[p].row].v1, enc[pairs[p].col].v0) with randomness rnd[p].
std::vector<std::vector<AheCiphertext>> lin_compare_pairs(std::span<const compare::EncryptedEncoding> enc,
                                                          std::span<const OrderedPair> pairs,
                                                          std::span<const compare::LinCompareRandomness> rnd, Exec exec);

struct ComparatorJob {
  const garble::GarbledComparator* circuit = nullptr;
  std::span<const garble::WireLabel> generator_input;
  std::span<const garble::WireLabel> evaluator_input;
};

std::vector<bool> evaluate_comparators(std::span<const ComparatorJob> jobs, Exec exec);

// out[i] = cts[i].A1 * weight, the partial decryption of each ciphertext.
std::vector<aheg::Point> partial_points(const aheg::Scalar& weight, std::span<const AheCiphertext> cts, Exec exec);

// out[i] = (r_i P, cts[i].A1 * weight + r_i pk): partial decryption re-encrypted to pk.
std::vector<AheCiphertext> partial_points_sealed(const aheg::Scalar& weight, std::span<const AheCiphertext> cts,
                                                 const aheg::Point& pk, std::span<const aheg::Scalar> r, Exec exec);

// out[i] = cts[i].A2 - sk * cts[i].A1.
std::vector<aheg::Point> decrypt_all(const aheg::Scalar& sk, std::span<const AheCiphertext> cts, Exec exec);

}  // namespace skre::kernels

#include "skre/kernels.hpp"

#include "skre/errors.hpp"

namespace skre::kernels {

std::vector<std::vector<AheCiphertext>> lin_compare_pairs(std::span<const compare::EncryptedEncoding> enc,
                                                          std::span<const OrderedPair> pairs,
                                                          std::span<const compare::LinCompareRandomness> rnd, Exec exec) {
  if (pairs.size() != rnd.size()) throw ConfigError("lin_compare_pairs: one randomness record per pair");
  for (const auto& p : pairs) {
    if (p.row >= enc.size() || p.col >= enc.size()) throw ConfigError("lin_compare_pairs: index out of range");
    if (enc[p.row].v1.size() != enc[p.col].v0.size()) throw ConfigError("lin_compare_pairs: width mismatch");
  }
  std::vector<std::vector<AheCiphertext>> out(pairs.size());
  parallel_for(pairs.size(), exec, [&](std::size_t i) {
    out[i] = compare::lin_compare_with(enc[pairs[i].row].v1, enc[pairs[i].col].v0, rnd[i]);
  });
  return out;
}

std::vector<bool> evaluate_comparators(std::span<const ComparatorJob> jobs, Exec exec) {
  for (const auto& j : jobs) {
    if (!j.circuit) throw ConfigError("evaluate_comparators: missing circuit");
  }
  std::vector<std::uint8_t> bits(jobs.size());
  parallel_for(jobs.size(), exec, [&](std::size_t i) {
    bits[i] = garble::evaluate(*jobs[i].circuit, jobs[i].generator_input, jobs[i].evaluator_input) ? 1 : 0;
  });
  return {bits.begin(), bits.end()};
}

std::vector<aheg::Point> partial_points(const aheg::Scalar& weight, std::span<const AheCiphertext> cts, Exec exec) {
  std::vector<aheg::Point> out(cts.size());
  parallel_for(cts.size(), exec, [&](std::size_t i) { out[i] = cts[i].a1 * weight; });
  return out;
}

std::vector<AheCiphertext> partial_points_sealed(const aheg::Scalar& weight, std::span<const AheCiphertext> cts,
                                                 const aheg::Point& pk, std::span<const aheg::Scalar> r, Exec exec) {
  if (r.size() != cts.size()) throw ConfigError("partial_points_sealed: one nonce per ciphertext");
  std::vector<AheCiphertext> out(cts.size());
  parallel_for(cts.size(), exec, [&](std::size_t i) {
    out[i] = {aheg::Point::base_mul(r[i]), cts[i].a1 * weight + pk * r[i]};
  });
  return out;
}

std::vector<aheg::Point> decrypt_all(const aheg::Scalar& sk, std::span<const AheCiphertext> cts, Exec exec) {
  std::vector<aheg::Point> out(cts.size());
  parallel_for(cts.size(), exec, [&](std::size_t i) { out[i] = aheg::decrypt(sk, cts[i]); });
  return out;
}

}  // namespace skre::kernels

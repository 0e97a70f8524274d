#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skre/aheg.hpp"
#include "skre/errors.hpp"

namespace skre::proto {

// Positions are 1-based slots of the live roster; permutations are 0-based arrays with
// perm[j - 1] + 1 = pi(j).
struct DecReqRow {
  std::uint32_t logical_row = 0;  // j; its combiner is the client at position j
  std::uint32_t source_row = 0;   // pi(j), the matrix row actually handed out
  std::vector<std::uint32_t> decryptors;  // positions j, j+1, ..., j+t-1 (mod n)
};

struct DecryptionRequest {
  std::uint32_t client = 0;
  std::vector<DecReqRow> rows;  // logical rows i-t+1, ..., i (mod n), in that order
};

// Positions holding logical row j: the t clients whose request windows contain j.
std::vector<std::uint32_t> decryptor_positions(std::uint32_t j, std::uint32_t n, std::uint32_t t);

DecryptionRequest dec_req(std::uint32_t n, std::uint32_t i, std::uint32_t t, std::span<const std::size_t> pi);

// Matrix rows handed to client i, in request order. G must be n rows of equal length.
template <class T>
std::vector<std::vector<T>> dec_req_slice(const std::vector<std::vector<T>>& G, std::uint32_t i, std::uint32_t t,
                                          std::span<const std::size_t> pi) {
  if (G.empty()) throw ConfigError("dec_req: empty matrix");
  for (const auto& row : G) {
    if (row.size() != G[0].size()) throw ConfigError("dec_req: malformed matrix");
  }
  const auto req = dec_req(static_cast<std::uint32_t>(G.size()), i, t, pi);
  std::vector<std::vector<T>> out;
  for (const auto& r : req.rows) out.push_back(G[r.source_row - 1]);
  return out;
}

// Server-side rank selection over the comparison matrix.
// G[i][j] (0-based) must hold Enc([x_i >= x_j]) wherever paired(i+1, j+1) holds and
// Enc(1) on the diagonal; other entries are ignored. Returns
// y_i = alpha_i * (r_i - k) + x_i, which encrypts x_i exactly when r_i = k.
std::vector<aheg::AheCiphertext> compute_kre_ahe(const std::vector<std::vector<std::optional<aheg::AheCiphertext>>>& G,
                                                 std::span<const aheg::AheCiphertext> X, std::uint32_t k,
                                                 std::span<const aheg::Scalar> alpha);

}  // namespace skre::proto

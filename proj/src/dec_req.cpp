#include "skre/dec_req.hpp"

#include <string>

#include "skre/core.hpp"

namespace skre::proto {
namespace {

std::uint32_t wrap(std::int64_t v, std::uint32_t n) {
  const std::int64_t m = ((v - 1) % n + n) % n;
  return static_cast<std::uint32_t>(m + 1);
}

}  // namespace

std::vector<std::uint32_t> decryptor_positions(std::uint32_t j, std::uint32_t n, std::uint32_t t) {
  if (n == 0 || j < 1 || j > n) throw ConfigError("decryptor_positions: row outside [1, n]");
  if (t < 1 || t > n) throw ConfigError("decryptor_positions: t outside [1, n]");
  std::vector<std::uint32_t> out;
  for (std::uint32_t u = 0; u < t; ++u) out.push_back(wrap(std::int64_t{j} + u, n));
  return out;
}

DecryptionRequest dec_req(std::uint32_t n, std::uint32_t i, std::uint32_t t, std::span<const std::size_t> pi) {
  if (i < 1 || i > n) throw ConfigError("dec_req: client position outside [1, n]");
  if (t < 1 || t > n) throw ConfigError("dec_req: t outside [1, n]");
  if (pi.size() != n) throw ConfigError("dec_req: permutation has wrong length");
  DecryptionRequest req;
  req.client = i;
  for (std::uint32_t u = 1; u <= t; ++u) {
    const std::uint32_t j = wrap(std::int64_t{i} - t + u, n);
    if (pi[j - 1] >= n) throw ConfigError("dec_req: permutation entry out of range");
    req.rows.push_back({j, static_cast<std::uint32_t>(pi[j - 1] + 1), decryptor_positions(j, n, t)});
  }
  return req;
}

std::vector<aheg::AheCiphertext> compute_kre_ahe(const std::vector<std::vector<std::optional<aheg::AheCiphertext>>>& G,
                                                 std::span<const aheg::AheCiphertext> X, std::uint32_t k,
                                                 std::span<const aheg::Scalar> alpha) {
  const std::size_t n = X.size();
  if (G.size() != n || alpha.size() != n) throw ConfigError("compute_kre_ahe: dimension mismatch");
  const aheg::Scalar one = aheg::Scalar::from_u64(1);
  auto entry = [&](std::size_t i, std::size_t j) -> const aheg::AheCiphertext& {
    if (G[i].size() != n || !G[i][j]) {
      throw ConfigError("compute_kre_ahe: missing entry (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
    }
    return *G[i][j];
  };
  std::vector<aheg::AheCiphertext> Y;
  Y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i].is_zero()) throw ConfigError("compute_kre_ahe: alpha must be nonzero");
    aheg::AheCiphertext r = entry(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto ii = static_cast<std::uint32_t>(i + 1);
      const auto jj = static_cast<std::uint32_t>(j + 1);
      if (core::paired(ii, jj)) {
        r = aheg::add(r, entry(i, j));
      } else {
        r = aheg::add(r, aheg::add_plain(aheg::negate(entry(j, i)), one));  // b_ij = 1 - b_ji
      }
    }
    const aheg::AheCiphertext shifted = aheg::add_plain(r, -aheg::Scalar::from_u64(k));
    Y.push_back(aheg::add(aheg::scalar_mul(shifted, alpha[i]), X[i]));
  }
  return Y;
}

}  // namespace skre::proto

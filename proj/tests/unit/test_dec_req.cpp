#include <map>
#include <set>

#include "doctest.h"
#include "skre/core.hpp"
#include "skre/dec_req.hpp"

using namespace skre;
using namespace skre::proto;
namespace core = skre::core;

namespace {

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  return p;
}

std::set<std::uint32_t> rows_of(const DecryptionRequest& r) {
  std::set<std::uint32_t> s;
  for (const auto& row : r.rows) s.insert(row.logical_row);
  return s;
}

}  // namespace

TEST_CASE("three clients, threshold two") {
  const auto id = identity(3);
  CHECK(rows_of(dec_req(3, 1, 2, id)) == std::set<std::uint32_t>{1, 3});
  CHECK(rows_of(dec_req(3, 2, 2, id)) == std::set<std::uint32_t>{1, 2});
  CHECK(rows_of(dec_req(3, 3, 2, id)) == std::set<std::uint32_t>{2, 3});
  CHECK(decryptor_positions(1, 3, 2) == std::vector<std::uint32_t>{1, 2});
  CHECK(decryptor_positions(2, 3, 2) == std::vector<std::uint32_t>{2, 3});
  const auto d3 = decryptor_positions(3, 3, 2);
  CHECK(std::set<std::uint32_t>(d3.begin(), d3.end()) == std::set<std::uint32_t>{1, 3});
  // Rows come in wraparound order i-t+1, ..., i.
  const auto r1 = dec_req(3, 1, 2, id);
  CHECK(r1.rows[0].logical_row == 3);
  CHECK(r1.rows[1].logical_row == 1);
}

TEST_CASE("threshold one hands every client its own row") {
  for (std::uint32_t n = 1; n <= 8; ++n) {
    for (std::uint32_t i = 1; i <= n; ++i) {
      const auto r = dec_req(n, i, 1, identity(n));
      REQUIRE(r.rows.size() == 1);
      CHECK(r.rows[0].logical_row == i);
      CHECK(r.rows[0].decryptors == std::vector<std::uint32_t>{i});
    }
  }
}

TEST_CASE("every row is requested t times and every request holds t rows") {
  Prng rng = Prng::from_seed(41, "test-decreq");
  for (std::uint32_t n = 1; n <= 8; ++n) {
    for (std::uint32_t t = 1; t <= n; ++t) {
      const auto pi = rng.permutation(n);
      std::map<std::uint32_t, std::set<std::uint32_t>> holders;
      for (std::uint32_t i = 1; i <= n; ++i) {
        const auto r = dec_req(n, i, t, pi);
        CHECK(r.client == i);
        CHECK(r.rows.size() == t);
        CHECK(rows_of(r).size() == t);
        for (const auto& row : r.rows) {
          holders[row.logical_row].insert(i);
          CHECK(row.source_row == pi[row.logical_row - 1] + 1);
          CHECK(row.decryptors == decryptor_positions(row.logical_row, n, t));
        }
      }
      for (std::uint32_t j = 1; j <= n; ++j) {
        const auto d = decryptor_positions(j, n, t);
        CHECK(holders[j] == std::set<std::uint32_t>(d.begin(), d.end()));
        CHECK(holders[j].count(j) == 1);  // the combiner decrypts its own row
      }
    }
  }
}

TEST_CASE("matrix slices follow the permutation") {
  const std::vector<std::vector<int>> G = {{10, 11}, {20, 21}, {30, 31}, {40, 41}};
  const std::vector<std::size_t> pi = {2, 0, 3, 1};
  const auto s = dec_req_slice(G, 2, 2, pi);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == std::vector<int>{30, 31});  // logical row 1 -> source row 3
  CHECK(s[1] == std::vector<int>{10, 11});  // logical row 2 -> source row 1
  const std::vector<std::vector<int>> ragged = {{1, 2}, {3}};
  CHECK_THROWS_AS(dec_req_slice(ragged, 1, 1, identity(2)), ConfigError);
  CHECK_THROWS_AS(dec_req(3, 4, 1, identity(3)), ConfigError);
  CHECK_THROWS_AS(dec_req(3, 1, 4, identity(3)), ConfigError);
  CHECK_THROWS_AS(dec_req(3, 1, 1, identity(2)), ConfigError);
}

TEST_CASE("rank selection over the comparison matrix") {
  Prng rng = Prng::from_seed(42, "test-decreq");
  const auto kp = aheg::keygen(rng);
  auto build = [&](const std::vector<std::uint64_t>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::vector<std::optional<aheg::AheCiphertext>>> G(n, std::vector<std::optional<aheg::AheCiphertext>>(n));
    for (std::size_t i = 0; i < n; ++i) {
      G[i][i] = aheg::encrypt(kp.pk, 1, rng);
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && core::paired(i + 1, j + 1)) G[i][j] = aheg::encrypt(kp.pk, xs[i] >= xs[j] ? 1 : 0, rng);
      }
    }
    return G;
  };
  SUBCASE("ranks (2, 1, 3), k = 2: only the first entry decodes") {
    const std::vector<std::uint64_t> xs = {20, 10, 30};
    const auto G = build(xs);
    std::vector<aheg::AheCiphertext> X;
    for (auto x : xs) X.push_back(aheg::encrypt(kp.pk, x, rng));
    std::vector<aheg::Scalar> alpha;
    for (int i = 0; i < 3; ++i) alpha.push_back(aheg::Scalar::random_nonzero(rng));
    const auto Y = compute_kre_ahe(G, X, 2, alpha);
    CHECK(aheg::decode_bounded(aheg::decrypt(kp.sk, Y[0]), 1u << 20) == 20u);
    CHECK(!aheg::decode_bounded(aheg::decrypt(kp.sk, Y[1]), 1u << 20).has_value());
    CHECK(!aheg::decode_bounded(aheg::decrypt(kp.sk, Y[2]), 1u << 20).has_value());

    auto missing = G;
    for (std::size_t j = 0; j < 3; ++j) {
      if (j != 0 && core::paired(1, j + 1)) missing[0][j].reset();
    }
    CHECK_THROWS_AS(compute_kre_ahe(missing, X, 2, alpha), ConfigError);
    auto zero_alpha = alpha;
    zero_alpha[1] = aheg::Scalar();
    CHECK_THROWS_AS(compute_kre_ahe(G, X, 2, zero_alpha), ConfigError);
  }
  SUBCASE("wrong-rank entries never decode") {
    int decodable = 0;
    for (int trial = 0; trial < 250; ++trial) {
      std::set<std::uint64_t> pool;
      while (pool.size() < 5) pool.insert(rng.uniform(1u << 10));
      std::vector<std::uint64_t> xs(pool.begin(), pool.end());
      const auto perm = rng.permutation(5);
      std::vector<std::uint64_t> shuffled(5);
      for (int i = 0; i < 5; ++i) shuffled[i] = xs[perm[i]];
      const auto G = build(shuffled);
      std::vector<aheg::AheCiphertext> X;
      for (auto x : shuffled) X.push_back(aheg::encrypt(kp.pk, x, rng));
      std::vector<aheg::Scalar> alpha;
      for (int i = 0; i < 5; ++i) alpha.push_back(aheg::Scalar::random_nonzero(rng));
      const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.uniform(5));
      const auto Y = compute_kre_ahe(G, X, k, alpha);
      for (int i = 0; i < 5; ++i) {
        const auto v = aheg::decode_bounded(aheg::decrypt(kp.sk, Y[i]), 1u << 10);
        if (shuffled[i] == xs[k - 1]) {
          CHECK(v == shuffled[i]);
        } else {
          decodable += v.has_value();
        }
      }
    }
    CHECK(decodable == 0);  // 1000 wrong-rank entries
  }
}

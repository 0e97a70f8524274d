#include "doctest.h"
#include "skre/kernels.hpp"

using namespace skre;
using namespace skre::kernels;

TEST_CASE("LinCompare batch: serial and parallel agree and match single calls") {
  Prng rng = Prng::from_seed(31, "test-kernels");
  const auto kp = aheg::keygen(rng);
  constexpr unsigned w = 6;
  const std::vector<std::uint64_t> xs = {5, 60, 33, 17};
  std::vector<compare::EncryptedEncoding> enc;
  for (auto x : xs) enc.push_back(compare::encrypt_encoding(kp.pk, core::encode_zero_one({x, w}, rng), rng));
  std::vector<OrderedPair> pairs;
  std::vector<compare::LinCompareRandomness> rnd;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (i == j) continue;
      pairs.push_back({i, j});
      rnd.push_back(compare::LinCompareRandomness::draw(w, rng));
    }
  }
  const auto ser = lin_compare_pairs(enc, pairs, rnd, Exec::Serial);
  const auto par = lin_compare_pairs(enc, pairs, rnd, Exec::Parallel);
  CHECK(ser == par);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    CHECK(ser[p] == compare::lin_compare_with(enc[pairs[p].row].v1, enc[pairs[p].col].v0, rnd[p]));
    std::size_t zeros = 0;
    for (const auto& c : ser[p]) zeros += aheg::is_zero(aheg::decrypt(kp.sk, c));
    CHECK(zeros == (xs[pairs[p].row] > xs[pairs[p].col] ? 1u : 0u));
  }
}

TEST_CASE("comparator batch: serial and parallel agree") {
  Prng rng = Prng::from_seed(32, "test-kernels");
  constexpr unsigned w = 8;
  std::vector<garble::Garbling> gs;
  std::vector<std::vector<garble::WireLabel>> gen, eva;
  std::vector<bool> want;
  for (int i = 0; i < 40; ++i) {
    garble::SharedSeed s;
    rng.fill(s.key);
    gs.push_back(garble::garble(s, w, 128));
    const std::uint64_t a = rng.uniform(256), b = rng.uniform(256);
    const bool bi = rng.bit(), bj = rng.bit();
    gen.push_back(garble::encode(gs.back().encoding, garble::Side::Generator, bi, core::BitVector::of(a, w)));
    eva.push_back(garble::encode(gs.back().encoding, garble::Side::Evaluator, bj, core::BitVector::of(b, w)));
    want.push_back(bi ^ bj ^ (a >= b));
  }
  std::vector<ComparatorJob> jobs;
  for (std::size_t i = 0; i < gs.size(); ++i) jobs.push_back({&gs[i].circuit, gen[i], eva[i]});
  CHECK(evaluate_comparators(jobs, Exec::Serial) == want);
  CHECK(evaluate_comparators(jobs, Exec::Parallel) == want);
}

TEST_CASE("partial decryption batches: serial and parallel agree") {
  Prng rng = Prng::from_seed(33, "test-kernels");
  const auto key = aheg::threshold_keygen(3, 2, rng);
  const auto personal = aheg::keygen(rng);
  std::vector<aheg::AheCiphertext> cts;
  std::vector<aheg::Scalar> rs;
  for (std::uint64_t m = 0; m < 30; ++m) {
    cts.push_back(aheg::encrypt(key.pk, m, rng));
    rs.push_back(aheg::Scalar::random_nonzero(rng));
  }
  const std::vector<std::uint32_t> set = {2, 3};
  const auto w2 = aheg::decryption_weight(key.shares[1], set), w3 = aheg::decryption_weight(key.shares[2], set);
  const auto p2 = partial_points(w2, cts, Exec::Serial);
  CHECK(p2 == partial_points(w2, cts, Exec::Parallel));
  const auto p3 = partial_points(w3, cts, Exec::Parallel);
  const auto sealed = partial_points_sealed(w3, cts, personal.pk, rs, Exec::Serial);
  CHECK(sealed == partial_points_sealed(w3, cts, personal.pk, rs, Exec::Parallel));
  const auto opened = decrypt_all(personal.sk, sealed, Exec::Parallel);
  CHECK(opened == decrypt_all(personal.sk, sealed, Exec::Serial));
  for (std::size_t m = 0; m < cts.size(); ++m) {
    CHECK(opened[m] == p3[m]);
    CHECK(p2[m] == aheg::partial_decrypt(key.shares[1], set, cts[m]).point);
    CHECK(aheg::decode_bounded(cts[m].a2 - p2[m] - p3[m], 64) == m);
  }
}

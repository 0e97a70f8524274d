#include <set>

#include "doctest.h"
#include "skre/aheg.hpp"
#include "skre/errors.hpp"

using namespace skre;
using namespace skre::aheg;

namespace {

std::optional<std::uint64_t> dec(const Scalar& sk, const AheCiphertext& c, std::uint64_t bound = 1u << 16) {
  return decode_bounded(decrypt(sk, c), bound);
}

}  // namespace

TEST_CASE("scalar and point arithmetic") {
  const Scalar two = Scalar::from_u64(2), three = Scalar::from_u64(3);
  CHECK(two + three == Scalar::from_u64(5));
  CHECK(three - two == Scalar::from_u64(1));
  CHECK((two - three) + Scalar::from_u64(1) == Scalar());
  CHECK(two * three.inverse() * three == two);
  CHECK(Scalar::from_i64(-1) + Scalar::from_u64(1) == Scalar());
  CHECK(Scalar::from_u64(7).to_u64() == 7u);
  CHECK(Scalar::from_bytes(three.to_bytes()) == three);
  CHECK_THROWS_AS(Scalar().inverse(), CryptoError);
  CHECK(Point::base_mul(Scalar::from_u64(1)) == Point::generator());
  CHECK(Point().is_identity());
  CHECK(Point::base_mul(two) + Point::base_mul(three) == Point::base_mul(Scalar::from_u64(5)));
  const Point q = Point::base_mul(Scalar::from_u64(11));
  CHECK(Point::from_bytes(q.to_bytes()) == q);
  CHECK(Point::from_bytes(Point().to_bytes()).is_identity());
  CHECK(Point::base_mul_add(two, q, three) == Point::base_mul(two) + q * three);
}

TEST_CASE("keygen round trip") {
  Prng rng = Prng::from_seed(1, "test-aheg");
  const auto kp = keygen(rng);
  for (std::uint64_t m = 0; m <= 1000; ++m) CHECK(dec(kp.sk, encrypt(kp.pk, m, rng)) == m);
  CHECK(keypair_from_secret(Scalar::from_u64(1)).pk == Point::generator());
  Prng other = Prng::from_seed(2, "test-aheg");
  CHECK(!(keygen(other).sk == kp.sk));
}

TEST_CASE("homomorphic operations") {
  Prng rng = Prng::from_seed(3, "test-aheg");
  const auto kp = keygen(rng);
  CHECK(is_zero(decrypt(kp.sk, encrypt(kp.pk, std::uint64_t{0}, rng))));
  CHECK(dec(kp.sk, add(encrypt(kp.pk, 2, rng), encrypt(kp.pk, 3, rng))) == 5u);
  const auto c7 = encrypt(kp.pk, 7, rng);
  CHECK(dec(kp.sk, add(c7, encrypt(kp.pk, std::uint64_t{0}, rng))) == 7u);
  CHECK(dec(kp.sk, rerandomize(c7, kp.pk, rng)) == 7u);
  CHECK(!(rerandomize(c7, kp.pk, rng) == c7));
  CHECK(dec(kp.sk, scalar_mul(encrypt(kp.pk, 3, rng), Scalar::from_u64(4))) == 12u);
  CHECK(dec(kp.sk, add(negate(encrypt(kp.pk, 5, rng)), encrypt(kp.pk, 5, rng))) == 0u);
  CHECK(dec(kp.sk, sub(encrypt(kp.pk, 9, rng), encrypt(kp.pk, 4, rng))) == 5u);
  CHECK(dec(kp.sk, add_plain(encrypt(kp.pk, 9, rng), Scalar::from_u64(4))) == 13u);

  // Sum of random full-width plaintexts, checked in the exponent against a scalar oracle.
  AheCiphertext acc = encrypt(kp.pk, std::uint64_t{0}, rng);
  Scalar sum;
  for (int i = 0; i < 10; ++i) {
    const Scalar m = Scalar::random(rng);
    acc = add(acc, encrypt(kp.pk, m, rng));
    sum = sum + m;
  }
  CHECK(decrypt(kp.sk, acc) == Point::base_mul(sum));
}

TEST_CASE("xor with a plaintext bit") {
  Prng rng = Prng::from_seed(4, "test-aheg");
  const auto kp = keygen(rng);
  const auto c1 = encrypt(kp.pk, 1, rng);
  CHECK(xor_plain(c1, false, kp.pk, rng) == c1);
  CHECK(dec(kp.sk, xor_plain(c1, true, kp.pk, rng)) == 0u);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      CHECK(dec(kp.sk, xor_plain(encrypt(kp.pk, a, rng), b, kp.pk, rng)) == static_cast<std::uint64_t>(a ^ b));
    }
  }
}

TEST_CASE("threshold decryption") {
  Prng rng = Prng::from_seed(5, "test-aheg");
  SUBCASE("t = 1: every share alone decrypts") {
    const auto key = threshold_keygen(3, 1, rng);
    const auto c = encrypt(key.pk, 42, rng);
    for (const auto& s : key.shares) {
      const std::vector<std::uint32_t> set = {s.index};
      const auto p = partial_decrypt(s, set, c);
      CHECK(p.point == c.a1 * s.value);
      const std::vector<PartialDecryption> ps = {p};
      CHECK(decode_bounded(final_decrypt(c, ps, 1), 100) == 42u);
    }
  }
  SUBCASE("t = n = 3: two partials are not enough") {
    const Scalar secret = Scalar::random_nonzero(rng);
    const auto key = share_secret(secret, 3, 3, rng);
    const auto c = encrypt(key.pk, 9, rng);
    const std::vector<std::uint32_t> all = {1, 2, 3}, two = {1, 2};
    std::vector<PartialDecryption> ps;
    for (auto i : all) ps.push_back(partial_decrypt(key.shares[i - 1], all, c));
    CHECK(final_decrypt(c, ps, 3) == decrypt(secret, c));
    std::vector<PartialDecryption> short_ps;
    for (auto i : two) short_ps.push_back(partial_decrypt(key.shares[i - 1], two, c));
    CHECK(!(final_decrypt(c, short_ps, 2) == decrypt(secret, c)));
    CHECK_THROWS_AS(final_decrypt(c, short_ps, 3), CryptoError);
  }
  SUBCASE("t = 2, n = 3: every 2-subset agrees with the full key") {
    const Scalar secret = Scalar::random_nonzero(rng);
    const auto key = share_secret(secret, 3, 2, rng);
    CHECK(key.pk == Point::base_mul(secret));
    for (int m = 0; m < 100; ++m) {
      const Scalar pt = Scalar::random(rng);
      const auto c = encrypt(key.pk, pt, rng);
      for (const std::vector<std::uint32_t> set : {std::vector<std::uint32_t>{1, 2}, {1, 3}, {2, 3}}) {
        std::vector<PartialDecryption> ps;
        for (auto i : set) ps.push_back(partial_decrypt(key.shares[i - 1], set, c));
        CHECK(final_decrypt(c, ps, 2) == Point::base_mul(pt));
      }
    }
  }
  SUBCASE("misuse is rejected") {
    const auto key = threshold_keygen(3, 2, rng);
    const auto c = encrypt(key.pk, 1, rng);
    const std::vector<std::uint32_t> set = {1, 2}, dup = {1, 1};
    CHECK_THROWS_AS(partial_decrypt(key.shares[2], set, c), CryptoError);
    CHECK_THROWS_AS(partial_decrypt(key.shares[0], dup, c), CryptoError);
    const auto p = partial_decrypt(key.shares[0], set, c);
    const std::vector<PartialDecryption> twice = {p, p};
    CHECK_THROWS_AS(final_decrypt(c, twice, 2), CryptoError);
    CHECK_THROWS_AS(threshold_keygen(3, 4, rng), ConfigError);
    // Wrong membership: partials computed for a different announced set.
    const std::vector<std::uint32_t> other = {1, 3};
    const std::vector<PartialDecryption> mixed = {partial_decrypt(key.shares[0], other, c),
                                                  partial_decrypt(key.shares[1], set, c)};
    CHECK(!(final_decrypt(c, mixed, 2) == Point::base_mul(Scalar::from_u64(1))));
  }
}

TEST_CASE("bounded decoding agrees with a linear scan") {
  CHECK(decode_bounded(Point(), 1) == 0u);
  for (unsigned w = 1; w <= 16; ++w) {
    const std::uint64_t top = (std::uint64_t{1} << w) - 1;
    CHECK(decode_bounded(Point::base_mul(Scalar::from_u64(top)), std::uint64_t{1} << w) == top);
    CHECK(!decode_bounded(Point::base_mul(Scalar::from_u64(top + 1)), std::uint64_t{1} << w).has_value());
  }
  Point acc;
  for (std::uint64_t m = 0; m < 3000; ++m) {
    REQUIRE(decode_bounded(acc, 3000) == m);
    acc = acc + Point::generator();
  }
  CHECK(decode_bounded(Point::base_mul(Scalar::from_u64(1ull << 39)), 1ull << 40) == (1ull << 39));
  CHECK_THROWS_AS(decode_bounded(Point(), (1ull << 40) + 1), ConfigError);
}

TEST_CASE("random points are not decodable") {
  Prng rng = Prng::from_seed(6, "test-aheg");
  int decodable = 0;
  for (int i = 0; i < 1000; ++i) decodable += decode_bounded(Point::base_mul(Scalar::random(rng)), 1u << 20).has_value();
  CHECK(decodable == 0);  // probability about 1000 * 2^20 / 2^256
}

TEST_CASE("ciphertext and sealed box encodings") {
  Prng rng = Prng::from_seed(7, "test-aheg");
  const auto kp = keygen(rng);
  const auto c = encrypt(kp.pk, 5, rng);
  CHECK(c.to_bytes().size() == AheCiphertext::wire_size());
  CHECK(AheCiphertext::from_bytes(c.to_bytes()) == c);
  CHECK_THROWS_AS(AheCiphertext::from_bytes(Bytes(3, 0)), WireError);
  Bytes bad = c.to_bytes();
  bad[0] = 0x07;  // not a valid compression prefix
  CHECK_THROWS(AheCiphertext::from_bytes(bad));

  const Bytes msg = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto box = seal(kp.pk, msg, rng);
  CHECK(box.body.size() == msg.size());
  CHECK(open(kp.sk, box) == msg);
  CHECK(open(keygen(rng).sk, box) != msg);
  const auto c_pt = encrypt_point(kp.pk, Point::base_mul(Scalar::from_u64(77)), rng);
  CHECK(decrypt(kp.sk, c_pt) == Point::base_mul(Scalar::from_u64(77)));
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "skre/bytes.hpp"
#include "skre/prng.hpp"

struct bignum_st;
struct ec_group_st;
struct ec_point_st;

namespace skre::aheg {

// Curve parameters shared by every key in the process. The curve is fixed at build time.
class Group {
 public:
  static const Group& instance();

  const ec_group_st* raw() const { return group_; }
  const bignum_st* order() const { return order_; }
  std::size_t point_bytes() const { return point_bytes_; }
  std::size_t scalar_bytes() const { return scalar_bytes_; }
  const char* curve_name() const;

 private:
  Group();
  ec_group_st* group_ = nullptr;
  bignum_st* order_ = nullptr;
  std::size_t point_bytes_ = 0;
  std::size_t scalar_bytes_ = 0;
};

// Integer modulo the group order p.
class Scalar {
 public:
  Scalar();
  Scalar(const Scalar& other);
  Scalar& operator=(const Scalar& other);
  Scalar(Scalar&&) noexcept;
  Scalar& operator=(Scalar&&) noexcept;
  ~Scalar();

  static Scalar from_u64(std::uint64_t v);
  static Scalar from_i64(std::int64_t v);
  static Scalar random(Prng& rng);          // uniform in [0, p)
  static Scalar random_nonzero(Prng& rng);  // uniform in [1, p)
  static Scalar from_bytes(std::span<const std::uint8_t> bytes);

  Bytes to_bytes() const;
  bool is_zero() const;
  std::optional<std::uint64_t> to_u64() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar inverse() const;
  bool operator==(const Scalar& o) const;

  const bignum_st* raw() const { return bn_; }

 private:
  explicit Scalar(bignum_st* bn) : bn_(bn) {}
  bignum_st* bn_ = nullptr;
};

// Group element; the default value is the identity.
class Point {
 public:
  Point();
  Point(const Point& other);
  Point& operator=(const Point& other);
  Point(Point&&) noexcept;
  Point& operator=(Point&&) noexcept;
  ~Point();

  static const Point& generator();
  static Point base_mul(const Scalar& a);
  // a*P + b*Q in one multi-scalar multiplication.
  static Point base_mul_add(const Scalar& a, const Point& q, const Scalar& b);
  // Compressed encoding; the identity is all zero bytes.
  static Point from_bytes(std::span<const std::uint8_t> bytes);

  Bytes to_bytes() const;
  void write_to(std::uint8_t* out) const;
  bool is_identity() const;

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point operator-() const;
  Point operator*(const Scalar& a) const;
  bool operator==(const Point& o) const;

  const ec_point_st* raw() const { return pt_; }

 private:
  explicit Point(ec_point_st* pt) : pt_(pt) {}
  ec_point_st* pt_ = nullptr;
};

struct AheKeyPair {
  Scalar sk;
  Point pk;
};

struct AheCiphertext {
  Point a1;  // r*P
  Point a2;  // m*P + r*pk

  Bytes to_bytes() const;
  static AheCiphertext from_bytes(std::span<const std::uint8_t> bytes);
  static std::size_t wire_size() { return 2 * Group::instance().point_bytes(); }
  bool operator==(const AheCiphertext& o) const { return a1 == o.a1 && a2 == o.a2; }
};

struct KeyShare {
  std::uint32_t index = 0;  // evaluation point of the sharing polynomial, 1-based
  Scalar value;
};

struct ThresholdKey {
  Point pk;
  std::uint32_t t = 0;
  std::vector<KeyShare> shares;  // shares[i] has index i+1
};

struct PartialDecryption {
  std::uint32_t index = 0;
  Point point;  // A1 * s_i * l_i
};

AheKeyPair keygen(Prng& rng);
AheKeyPair keypair_from_secret(const Scalar& sk);
ThresholdKey threshold_keygen(std::uint32_t n, std::uint32_t t, Prng& rng);
// Shamir sharing of a caller-chosen secret; exposed so tests can compare with the full key.
ThresholdKey share_secret(const Scalar& secret, std::uint32_t n, std::uint32_t t, Prng& rng);

AheCiphertext encrypt(const Point& pk, const Scalar& m, Prng& rng);
AheCiphertext encrypt(const Point& pk, std::uint64_t m, Prng& rng);
AheCiphertext encrypt_with(const Point& pk, const Scalar& m, const Scalar& r);
// ElGamal on a group element rather than an exponent: (rP, M + r*pk).
AheCiphertext encrypt_point(const Point& pk, const Point& message, Prng& rng);

AheCiphertext add(const AheCiphertext& a, const AheCiphertext& b);
AheCiphertext sub(const AheCiphertext& a, const AheCiphertext& b);
AheCiphertext negate(const AheCiphertext& c);
AheCiphertext scalar_mul(const AheCiphertext& c, const Scalar& a);
AheCiphertext add_plain(const AheCiphertext& c, const Scalar& m);
AheCiphertext rerandomize(const AheCiphertext& c, const Point& pk, Prng& rng);
// Encryption of a XOR b for a bit-encrypting c: c itself when b = 0, Enc(1) - c when b = 1.
AheCiphertext xor_plain(const AheCiphertext& c, bool b, const Point& pk, Prng& rng);

// Q = A2 - sk*A1, which is m*P for exponent ciphertexts and M for point ciphertexts.
Point decrypt(const Scalar& sk, const AheCiphertext& c);

Scalar lagrange_coefficient(std::uint32_t index, std::span<const std::uint32_t> decryptor_set);
// s_i * l_i for the announced set; reusable across many ciphertexts.
Scalar decryption_weight(const KeyShare& share, std::span<const std::uint32_t> decryptor_set);
PartialDecryption partial_decrypt(const KeyShare& share, std::span<const std::uint32_t> decryptor_set, const AheCiphertext& c);
Point final_decrypt(const AheCiphertext& c, std::span<const PartialDecryption> partials, std::uint32_t t);

bool is_zero(const Point& q);
// Smallest m in [0, bound) with m*P = q, or nullopt. bound <= 2^40.
std::optional<std::uint64_t> decode_bounded(const Point& q, std::uint64_t bound);

// Byte payload encrypted to a public key: (rP, keystream(r*pk) XOR payload).
struct SealedBox {
  Point ephemeral;
  Bytes body;
};
SealedBox seal(const Point& pk, std::span<const std::uint8_t> payload, Prng& rng);
Bytes open(const Scalar& sk, const SealedBox& box);

}  // namespace skre::aheg

#include "skre/aheg.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>
#include <openssl/objects.h>

#include <algorithm>
#include <string>

#include "skre/errors.hpp"
#include "skre/hash.hpp"

namespace skre::aheg {
namespace {

BN_CTX* bn_ctx() {
  struct Holder {
    BN_CTX* ctx = BN_CTX_new();
    ~Holder() { BN_CTX_free(ctx); }
  };
  thread_local Holder holder;
  if (!holder.ctx) throw CryptoError("BN_CTX_new failed");
  return holder.ctx;
}

const EC_GROUP* grp() { return Group::instance().raw(); }
const BIGNUM* order() { return Group::instance().order(); }

BIGNUM* new_bn() {
  BIGNUM* bn = BN_new();
  if (!bn) throw CryptoError("BN_new failed");
  return bn;
}

EC_POINT* new_point() {
  EC_POINT* p = EC_POINT_new(grp());
  if (!p) throw CryptoError("EC_POINT_new failed");
  return p;
}

void check(int rc, const char* what) {
  if (rc != 1) throw CryptoError(std::string(what) + " failed");
}

}  // namespace

Group::Group() {
  const int nid = OBJ_sn2nid(SKRE_CURVE_NAME);
  if (nid == NID_undef) throw CryptoError(std::string("unknown curve ") + SKRE_CURVE_NAME);
  group_ = EC_GROUP_new_by_curve_name(nid);
  if (!group_) throw CryptoError("EC_GROUP_new_by_curve_name failed");
  order_ = BN_dup(EC_GROUP_get0_order(group_));
  point_bytes_ = 1 + (static_cast<std::size_t>(EC_GROUP_get_degree(group_)) + 7) / 8;
  scalar_bytes_ = static_cast<std::size_t>(BN_num_bytes(order_));
}

const Group& Group::instance() {
  static const Group g;
  return g;
}

const char* Group::curve_name() const { return SKRE_CURVE_NAME; }

// ---- Scalar ----

Scalar::Scalar() : bn_(new_bn()) { BN_zero(bn_); }
Scalar::Scalar(const Scalar& other) : bn_(BN_dup(other.bn_)) {
  if (!bn_) throw CryptoError("BN_dup failed");
}
Scalar& Scalar::operator=(const Scalar& other) {
  if (this != &other) check(BN_copy(bn_, other.bn_) ? 1 : 0, "BN_copy");
  return *this;
}
Scalar::Scalar(Scalar&& other) noexcept : bn_(other.bn_) { other.bn_ = nullptr; }
Scalar& Scalar::operator=(Scalar&& other) noexcept {
  std::swap(bn_, other.bn_);
  return *this;
}
Scalar::~Scalar() { BN_clear_free(bn_); }

Scalar Scalar::from_u64(std::uint64_t v) {
  Scalar s;
  check(BN_set_word(s.bn_, v), "BN_set_word");
  check(BN_nnmod(s.bn_, s.bn_, order(), bn_ctx()), "BN_nnmod");
  return s;
}

Scalar Scalar::from_i64(std::int64_t v) {
  if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
  const std::uint64_t mag = v == INT64_MIN ? (std::uint64_t{1} << 63) : static_cast<std::uint64_t>(-v);
  return -from_u64(mag);
}

Scalar Scalar::random(Prng& rng) {
  const std::size_t len = Group::instance().scalar_bytes();
  Bytes buf(len);
  for (;;) {
    rng.fill(buf);
    Scalar s;
    check(BN_bin2bn(buf.data(), static_cast<int>(len), s.bn_) ? 1 : 0, "BN_bin2bn");
    if (BN_cmp(s.bn_, order()) < 0) return s;
  }
}

Scalar Scalar::random_nonzero(Prng& rng) {
  for (;;) {
    Scalar s = random(rng);
    if (!s.is_zero()) return s;
  }
}

Scalar Scalar::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != Group::instance().scalar_bytes()) throw WireError("scalar has wrong width");
  Scalar s;
  check(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), s.bn_) ? 1 : 0, "BN_bin2bn");
  if (BN_cmp(s.bn_, order()) >= 0) throw WireError("scalar not reduced modulo the group order");
  return s;
}

Bytes Scalar::to_bytes() const {
  Bytes out(Group::instance().scalar_bytes());
  check(BN_bn2binpad(bn_, out.data(), static_cast<int>(out.size())) == static_cast<int>(out.size()) ? 1 : 0, "BN_bn2binpad");
  return out;
}

bool Scalar::is_zero() const { return BN_is_zero(bn_); }

std::optional<std::uint64_t> Scalar::to_u64() const {
  if (BN_num_bits(bn_) > 64) return std::nullopt;
  std::uint8_t buf[8] = {};
  BN_bn2binpad(bn_, buf, 8);
  std::uint64_t v = 0;
  for (auto b : buf) v = (v << 8) | b;
  return v;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar r;
  check(BN_mod_add(r.bn_, bn_, o.bn_, order(), bn_ctx()), "BN_mod_add");
  return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar r;
  check(BN_mod_sub(r.bn_, bn_, o.bn_, order(), bn_ctx()), "BN_mod_sub");
  return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar r;
  check(BN_mod_mul(r.bn_, bn_, o.bn_, order(), bn_ctx()), "BN_mod_mul");
  return r;
}

Scalar Scalar::operator-() const { return Scalar() - *this; }

Scalar Scalar::inverse() const {
  if (is_zero()) throw CryptoError("inverse of zero");
  Scalar r;
  check(BN_mod_inverse(r.bn_, bn_, order(), bn_ctx()) ? 1 : 0, "BN_mod_inverse");
  return r;
}

bool Scalar::operator==(const Scalar& o) const { return BN_cmp(bn_, o.bn_) == 0; }

// ---- Point ----

Point::Point() : pt_(new_point()) { check(EC_POINT_set_to_infinity(grp(), pt_), "EC_POINT_set_to_infinity"); }
Point::Point(const Point& other) : pt_(EC_POINT_dup(other.pt_, grp())) {
  if (!pt_) throw CryptoError("EC_POINT_dup failed");
}
Point& Point::operator=(const Point& other) {
  if (this != &other) check(EC_POINT_copy(pt_, other.pt_), "EC_POINT_copy");
  return *this;
}
Point::Point(Point&& other) noexcept : pt_(other.pt_) { other.pt_ = nullptr; }
Point& Point::operator=(Point&& other) noexcept {
  std::swap(pt_, other.pt_);
  return *this;
}
Point::~Point() { EC_POINT_free(pt_); }

const Point& Point::generator() {
  static const Point g(EC_POINT_dup(EC_GROUP_get0_generator(grp()), grp()));
  return g;
}

Point Point::base_mul(const Scalar& a) {
  Point r(new_point());
  check(EC_POINT_mul(grp(), r.pt_, a.raw(), nullptr, nullptr, bn_ctx()), "EC_POINT_mul");
  return r;
}

Point Point::base_mul_add(const Scalar& a, const Point& q, const Scalar& b) {
  Point r(new_point());
  check(EC_POINT_mul(grp(), r.pt_, a.raw(), q.pt_, b.raw(), bn_ctx()), "EC_POINT_mul");
  return r;
}

Point Point::from_bytes(std::span<const std::uint8_t> bytes) {
  const std::size_t width = Group::instance().point_bytes();
  if (bytes.size() != width) throw WireError("point has wrong width");
  if (std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; })) return Point();
  Point r(new_point());
  if (EC_POINT_oct2point(grp(), r.pt_, bytes.data(), bytes.size(), bn_ctx()) != 1) throw WireError("invalid curve point");
  return r;
}

void Point::write_to(std::uint8_t* out) const {
  const std::size_t width = Group::instance().point_bytes();
  if (is_identity()) {
    std::fill(out, out + width, 0);
    return;
  }
  if (EC_POINT_point2oct(grp(), pt_, POINT_CONVERSION_COMPRESSED, out, width, bn_ctx()) != width) {
    throw CryptoError("point serialisation failed");
  }
}

Bytes Point::to_bytes() const {
  Bytes out(Group::instance().point_bytes());
  write_to(out.data());
  return out;
}

bool Point::is_identity() const { return EC_POINT_is_at_infinity(grp(), pt_) == 1; }

Point Point::operator+(const Point& o) const {
  Point r(new_point());
  check(EC_POINT_add(grp(), r.pt_, pt_, o.pt_, bn_ctx()), "EC_POINT_add");
  return r;
}

Point Point::operator-() const {
  Point r(*this);
  check(EC_POINT_invert(grp(), r.pt_, bn_ctx()), "EC_POINT_invert");
  return r;
}

Point Point::operator-(const Point& o) const { return *this + (-o); }

Point Point::operator*(const Scalar& a) const {
  Point r(new_point());
  check(EC_POINT_mul(grp(), r.pt_, nullptr, pt_, a.raw(), bn_ctx()), "EC_POINT_mul");
  return r;
}

bool Point::operator==(const Point& o) const {
  const int rc = EC_POINT_cmp(grp(), pt_, o.pt_, bn_ctx());
  if (rc < 0) throw CryptoError("EC_POINT_cmp failed");
  return rc == 0;
}

// ---- Ciphertexts ----

Bytes AheCiphertext::to_bytes() const {
  const std::size_t w = Group::instance().point_bytes();
  Bytes out(2 * w);
  a1.write_to(out.data());
  a2.write_to(out.data() + w);
  return out;
}

AheCiphertext AheCiphertext::from_bytes(std::span<const std::uint8_t> bytes) {
  const std::size_t w = Group::instance().point_bytes();
  if (bytes.size() != 2 * w) throw WireError("ciphertext has wrong width");
  return {Point::from_bytes(bytes.first(w)), Point::from_bytes(bytes.subspan(w))};
}

AheKeyPair keypair_from_secret(const Scalar& sk) { return {sk, Point::base_mul(sk)}; }

AheKeyPair keygen(Prng& rng) { return keypair_from_secret(Scalar::random_nonzero(rng)); }

ThresholdKey share_secret(const Scalar& secret, std::uint32_t n, std::uint32_t t, Prng& rng) {
  if (t < 1 || t > n) throw ConfigError("threshold t must lie in [1, n]");
  std::vector<Scalar> coeffs{secret};
  for (std::uint32_t d = 1; d < t; ++d) coeffs.push_back(Scalar::random(rng));
  ThresholdKey key;
  key.pk = Point::base_mul(secret);
  key.t = t;
  for (std::uint32_t i = 1; i <= n; ++i) {
    const Scalar x = Scalar::from_u64(i);
    Scalar acc;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    key.shares.push_back({i, acc});
  }
  return key;
}

ThresholdKey threshold_keygen(std::uint32_t n, std::uint32_t t, Prng& rng) {
  return share_secret(Scalar::random_nonzero(rng), n, t, rng);
}

AheCiphertext encrypt_with(const Point& pk, const Scalar& m, const Scalar& r) {
  return {Point::base_mul(r), Point::base_mul_add(m, pk, r)};
}

AheCiphertext encrypt(const Point& pk, const Scalar& m, Prng& rng) { return encrypt_with(pk, m, Scalar::random_nonzero(rng)); }

AheCiphertext encrypt(const Point& pk, std::uint64_t m, Prng& rng) { return encrypt(pk, Scalar::from_u64(m), rng); }

AheCiphertext encrypt_point(const Point& pk, const Point& message, Prng& rng) {
  const Scalar r = Scalar::random_nonzero(rng);
  return {Point::base_mul(r), message + pk * r};
}

AheCiphertext add(const AheCiphertext& a, const AheCiphertext& b) { return {a.a1 + b.a1, a.a2 + b.a2}; }

AheCiphertext sub(const AheCiphertext& a, const AheCiphertext& b) { return {a.a1 - b.a1, a.a2 - b.a2}; }

AheCiphertext negate(const AheCiphertext& c) { return {-c.a1, -c.a2}; }

AheCiphertext scalar_mul(const AheCiphertext& c, const Scalar& a) { return {c.a1 * a, c.a2 * a}; }

AheCiphertext add_plain(const AheCiphertext& c, const Scalar& m) { return {c.a1, c.a2 + Point::base_mul(m)}; }

AheCiphertext rerandomize(const AheCiphertext& c, const Point& pk, Prng& rng) {
  return add(c, encrypt(pk, Scalar(), rng));
}

AheCiphertext xor_plain(const AheCiphertext& c, bool b, const Point& pk, Prng& rng) {
  if (!b) return c;
  return add(encrypt(pk, Scalar::from_u64(1), rng), negate(c));
}

Point decrypt(const Scalar& sk, const AheCiphertext& c) { return c.a2 - c.a1 * sk; }

Scalar lagrange_coefficient(std::uint32_t index, std::span<const std::uint32_t> decryptor_set) {
  bool member = false;
  for (std::size_t a = 0; a < decryptor_set.size(); ++a) {
    if (decryptor_set[a] == 0) throw CryptoError("share index 0 is reserved for the secret");
    for (std::size_t b = a + 1; b < decryptor_set.size(); ++b) {
      if (decryptor_set[a] == decryptor_set[b]) throw CryptoError("duplicate index in decryptor set");
    }
    member |= decryptor_set[a] == index;
  }
  if (!member) throw CryptoError("share index " + std::to_string(index) + " not in decryptor set");
  Scalar num = Scalar::from_u64(1);
  Scalar den = Scalar::from_u64(1);
  const Scalar xi = Scalar::from_u64(index);
  for (auto j : decryptor_set) {
    if (j == index) continue;
    const Scalar xj = Scalar::from_u64(j);
    num = num * xj;
    den = den * (xj - xi);
  }
  return num * den.inverse();
}

Scalar decryption_weight(const KeyShare& share, std::span<const std::uint32_t> decryptor_set) {
  return share.value * lagrange_coefficient(share.index, decryptor_set);
}

PartialDecryption partial_decrypt(const KeyShare& share, std::span<const std::uint32_t> decryptor_set, const AheCiphertext& c) {
  return {share.index, c.a1 * decryption_weight(share, decryptor_set)};
}

Point final_decrypt(const AheCiphertext& c, std::span<const PartialDecryption> partials, std::uint32_t t) {
  if (partials.size() != t) {
    throw CryptoError("expected " + std::to_string(t) + " partial decryptions, got " + std::to_string(partials.size()));
  }
  Point sum;
  for (std::size_t a = 0; a < partials.size(); ++a) {
    for (std::size_t b = a + 1; b < partials.size(); ++b) {
      if (partials[a].index == partials[b].index) throw CryptoError("duplicate partial decryption");
    }
    sum = sum + partials[a].point;
  }
  return c.a2 - sum;
}

bool is_zero(const Point& q) { return q.is_identity(); }

SealedBox seal(const Point& pk, std::span<const std::uint8_t> payload, Prng& rng) {
  const Scalar r = Scalar::random_nonzero(rng);
  SealedBox box{Point::base_mul(r), Bytes(payload.begin(), payload.end())};
  const Bytes shared = (pk * r).to_bytes();
  Prng stream(Sha256().update("skre-seal").update(shared).finish());
  Bytes pad(box.body.size());
  stream.fill(pad);
  for (std::size_t i = 0; i < pad.size(); ++i) box.body[i] ^= pad[i];
  return box;
}

Bytes open(const Scalar& sk, const SealedBox& box) {
  const Bytes shared = (box.ephemeral * sk).to_bytes();
  Prng stream(Sha256().update("skre-seal").update(shared).finish());
  Bytes out = box.body;
  Bytes pad(out.size());
  stream.fill(pad);
  for (std::size_t i = 0; i < pad.size(); ++i) out[i] ^= pad[i];
  return out;
}

}  // namespace skre::aheg

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "skre/aheg.hpp"
#include "skre/errors.hpp"

namespace skre::aheg {
namespace {

inline constexpr std::uint64_t kMaxBound = std::uint64_t{1} << 40;

// Baby steps j*P for j in [1, m), keyed by the first 8 bytes of the compressed encoding
// (parity byte plus 7 bytes of x). Hits are confirmed by recomputation, so key collisions
// cost time but never correctness.
struct BabySteps {
  std::uint64_t m = 0;
  Point giant;  // -(m*P)
  std::unordered_map<std::uint64_t, std::uint32_t> index;
};

std::uint64_t key_of(const std::uint8_t* enc) {
  std::uint64_t k = 0;
  for (int i = 0; i < 8; ++i) k = (k << 8) | enc[i];
  return k;
}

std::shared_ptr<const BabySteps> baby_steps(std::uint64_t m) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const BabySteps>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<BabySteps>();
  table->m = m;
  table->giant = -Point::base_mul(Scalar::from_u64(m));
  table->index.reserve(m);
  Bytes enc(Group::instance().point_bytes());
  Point cur = Point::generator();
  for (std::uint64_t j = 1; j < m; ++j) {
    cur.write_to(enc.data());
    table->index.emplace(key_of(enc.data()), static_cast<std::uint32_t>(j));
    cur = cur + Point::generator();
  }
  cache.emplace(m, table);
  return table;
}

}  // namespace

std::optional<std::uint64_t> decode_bounded(const Point& q, std::uint64_t bound) {
  if (bound == 0) return std::nullopt;
  if (bound > kMaxBound) throw ConfigError("decode bound exceeds 2^40");
  std::uint64_t m = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(bound))));
  while (m * m < bound) ++m;
  const auto table = baby_steps(m);
  Bytes enc(Group::instance().point_bytes());
  Point cur = q;
  for (std::uint64_t i = 0; i * m < bound; ++i, cur = cur + table->giant) {
    if (cur.is_identity()) return i * m;
    cur.write_to(enc.data());
    auto hit = table->index.find(key_of(enc.data()));
    if (hit == table->index.end()) continue;
    const std::uint64_t v = i * m + hit->second;
    if (v < bound && Point::base_mul(Scalar::from_u64(hit->second)) == cur) return v;
  }
  return std::nullopt;
}

}  // namespace skre::aheg

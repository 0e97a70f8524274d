#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace skre {

// Deterministic randomness: AES-128 in counter mode keyed by a 256-bit stream key.
// Streams are derived by hashing a parent key with a purpose label, so a derived
// stream depends only on the labels and never on how much the parent has consumed.
class Prng {
 public:
  using Key = std::array<std::uint8_t, 32>;

  explicit Prng(const Key& key);
  ~Prng();
  Prng(Prng&&) noexcept;
  Prng& operator=(Prng&&) noexcept;
  Prng(const Prng&) = delete;
  Prng& operator=(const Prng&) = delete;

  static Prng from_seed(std::uint64_t seed, std::string_view domain);
  static Prng from_os_entropy(std::string_view domain);

  Prng fork(std::string_view purpose, std::initializer_list<std::uint64_t> ids = {}) const;

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  // Uniform in [0, bound); bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  bool bit();
  // Uniform permutation of {0, ..., n-1} (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n);

  const Key& key() const { return key_; }

 private:
  void refill();

  Key key_{};
  struct Cipher;
  std::unique_ptr<Cipher> cipher_;
  std::array<std::uint8_t, 512> buffer_{};
  std::size_t used_ = 512;
};

Prng::Key derive_key(const Prng::Key& parent, std::string_view purpose, std::initializer_list<std::uint64_t> ids);

}  // namespace skre

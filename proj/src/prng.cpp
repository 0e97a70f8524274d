#include "skre/prng.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <random>

#include "skre/errors.hpp"
#include "skre/hash.hpp"

namespace skre {

struct Prng::Cipher {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
};

Prng::Key derive_key(const Prng::Key& parent, std::string_view purpose, std::initializer_list<std::uint64_t> ids) {
  Sha256 h;
  h.update(parent).update_u64(purpose.size()).update(purpose);
  for (auto id : ids) h.update_u64(id);
  return h.finish();
}

Prng::Prng(const Key& key) : key_(key), cipher_(std::make_unique<Cipher>()) {
  cipher_->ctx = EVP_CIPHER_CTX_new();
  static const std::uint8_t zero_iv[16] = {};
  if (!cipher_->ctx || EVP_EncryptInit_ex(cipher_->ctx, EVP_aes_128_ctr(), nullptr, key_.data(), zero_iv) != 1) {
    throw CryptoError("AES-CTR initialisation failed");
  }
}

Prng::~Prng() = default;
Prng::Prng(Prng&&) noexcept = default;
Prng& Prng::operator=(Prng&&) noexcept = default;

Prng Prng::from_seed(std::uint64_t seed, std::string_view domain) {
  Key root{};
  for (int i = 0; i < 8; ++i) root[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  return Prng(derive_key(root, domain, {}));
}

Prng Prng::from_os_entropy(std::string_view domain) {
  std::random_device rd;
  Key root{};
  for (std::size_t i = 0; i < root.size(); i += 4) {
    const std::uint32_t w = rd();
    std::memcpy(root.data() + i, &w, 4);
  }
  return Prng(derive_key(root, domain, {}));
}

Prng Prng::fork(std::string_view purpose, std::initializer_list<std::uint64_t> ids) const {
  return Prng(derive_key(key_, purpose, ids));
}

void Prng::refill() {
  static const std::uint8_t zeros[512] = {};
  int len = 0;
  if (EVP_EncryptUpdate(cipher_->ctx, buffer_.data(), &len, zeros, static_cast<int>(buffer_.size())) != 1) {
    throw CryptoError("AES-CTR keystream failed");
  }
  used_ = 0;
}

void Prng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (used_ == buffer_.size()) refill();
    const std::size_t n = std::min(out.size() - done, buffer_.size() - used_);
    std::memcpy(out.data() + done, buffer_.data() + used_, n);
    used_ += n;
    done += n;
  }
}

std::uint64_t Prng::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Prng::uniform(std::uint64_t bound) {
  if (bound == 0) throw ConfigError("uniform: empty range");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

bool Prng::bit() {
  std::uint8_t b;
  fill({&b, 1});
  return b & 1;
}

std::vector<std::size_t> Prng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[uniform(i)]);
  return p;
}

}  // namespace skre

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "skre/bytes.hpp"
#include "skre/parallel.hpp"
#include "skre/prng.hpp"

namespace skre::she {

// Backend-neutral ciphertext. `body` is opaque to everything except the backend that made it.
struct SlotCiphertext {
  std::uint32_t context_id = 0;
  std::uint32_t slots = 0;
  std::uint32_t depth = 0;
  std::uint64_t nonce = 0;
  std::vector<std::uint64_t> body;
};

// Slotted bit-vector homomorphic encryption: fixed slot count, bit plaintexts,
// slotwise XOR/AND and a multiplicative depth budget.
class SlotBackend {
 public:
  virtual ~SlotBackend() = default;

  virtual std::uint32_t context_id() const = 0;
  virtual std::size_t slot_count() const = 0;
  virtual std::uint32_t depth_budget() const = 0;

  // Slot j carries slots[j]; slots past the end are zero.
  virtual SlotCiphertext encrypt(std::span<const std::uint8_t> slots, Prng& rng) const = 0;
  virtual SlotCiphertext constant(bool value) const = 0;  // value replicated in every slot
  virtual SlotCiphertext add(const SlotCiphertext& a, const SlotCiphertext& b) const = 0;
  virtual SlotCiphertext mult(const SlotCiphertext& a, const SlotCiphertext& b) const = 0;

  virtual Bytes serialize(const SlotCiphertext& c) const = 0;
  virtual SlotCiphertext deserialize(std::span<const std::uint8_t> bytes) const = 0;
};

// ---- Cleartext debug backend with an n-out-of-n XOR-shared decryption key ----

struct SheKeyShare {
  std::uint32_t index = 0;  // 1-based
  std::uint64_t key[2] = {0, 0};
};

struct PartialResult {
  std::uint32_t index = 0;
  std::uint64_t nonce = 0;
  std::vector<std::uint8_t> mask;  // one byte per slot, 0 or 1
};

// Exact bit-level model. Serialized ciphertexts carry slot bits XOR a keyed mask, so a
// wire ciphertext is opened only by combining all n partial results. The context itself
// holds the combined key so that it can encrypt and read ciphertexts (test fixture only).
class DebugBackend final : public SlotBackend {
 public:
  DebugBackend(std::uint32_t context_id, std::size_t slots, std::uint32_t depth_budget, std::uint64_t key0, std::uint64_t key1);

  std::uint32_t context_id() const override { return id_; }
  std::size_t slot_count() const override { return slots_; }
  std::uint32_t depth_budget() const override { return budget_; }

  SlotCiphertext encrypt(std::span<const std::uint8_t> slots, Prng& rng) const override;
  SlotCiphertext constant(bool value) const override;
  SlotCiphertext add(const SlotCiphertext& a, const SlotCiphertext& b) const override;
  SlotCiphertext mult(const SlotCiphertext& a, const SlotCiphertext& b) const override;

  Bytes serialize(const SlotCiphertext& c) const override;
  SlotCiphertext deserialize(std::span<const std::uint8_t> bytes) const override;

  // Slot bits of an in-memory ciphertext (debug inspection).
  std::vector<std::uint8_t> peek(const SlotCiphertext& c) const;

 private:
  void check_same(const SlotCiphertext& a, const SlotCiphertext& b) const;
  std::uint32_t id_;
  std::size_t slots_;
  std::uint32_t budget_;
  std::uint64_t key_[2];
};

struct SheKeyMaterial {
  std::shared_ptr<const DebugBackend> context;
  std::vector<SheKeyShare> shares;  // shares[i] has index i+1
};

// Slot count defaults to the next power of two >= mu_prime.
std::size_t default_slot_count(unsigned mu_prime);
SheKeyMaterial debug_keygen(std::uint32_t n, std::size_t slots, std::uint32_t depth_budget, Prng& rng);

PartialResult partial_decrypt(const SheKeyShare& share, std::span<const std::uint8_t> wire_ciphertext);
// Requires exactly one partial from each of the n share holders, in any order.
std::vector<std::uint8_t> combine(std::span<const std::uint8_t> wire_ciphertext, std::span<const PartialResult> partials,
                                  std::uint32_t n);
std::vector<std::uint8_t> she_threshold_decrypt(const SlotBackend& backend, const SlotCiphertext& c,
                                                std::span<const SheKeyShare> shares, std::uint32_t n);

Bytes serialize_partial(const PartialResult& p);
PartialResult deserialize_partial(std::span<const std::uint8_t> bytes);

// ---- Homomorphic routines over any backend ----

SlotCiphertext she_add(const SlotBackend& b, const SlotCiphertext& x, const SlotCiphertext& y);
SlotCiphertext she_add(const SlotBackend& b, std::span<const SlotCiphertext> xs);
SlotCiphertext she_mult(const SlotBackend& b, const SlotCiphertext& x, const SlotCiphertext& y);

// Bitwise inputs are most significant first, one replicated ciphertext per bit.
std::pair<SlotCiphertext, SlotCiphertext> she_cmp(const SlotBackend& b, std::span<const SlotCiphertext> xi,
                                                  std::span<const SlotCiphertext> xj);
// Binary representation of the number of set inputs, most significant first, width ceil(log2(n+1)).
std::vector<SlotCiphertext> she_fadder(const SlotBackend& b, std::span<const SlotCiphertext> bits);
SlotCiphertext she_equal(const SlotBackend& b, std::span<const SlotCiphertext> x, std::span<const SlotCiphertext> y);

// X[i]: bitwise encryption of client i's distinct input; Z[i]: packed encryption of it;
// k_bits: bitwise encryption of the target rank, width ceil(log2(n+1)).
SlotCiphertext compute_kre_she(const SlotBackend& b, const std::vector<std::vector<SlotCiphertext>>& X,
                               std::span<const SlotCiphertext> Z, std::span<const SlotCiphertext> k_bits,
                               Exec exec = Exec::Parallel);

std::vector<SlotCiphertext> encrypt_bits(const SlotBackend& b, std::uint64_t value, unsigned width, Prng& rng);
SlotCiphertext encrypt_packed(const SlotBackend& b, std::uint64_t value, unsigned width, Prng& rng);
std::uint64_t decode_packed(std::span<const std::uint8_t> slots, unsigned width);

}  // namespace skre::she

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skre/aheg.hpp"
#include "skre/bytes.hpp"
#include "skre/garble.hpp"

namespace skre::wire {

// Payload = message kind byte, then a sequence of tagged items. Tags make every payload
// self-describing, so the metrics layer can count cryptographic items without knowing
// the protocol that produced them.
enum class Tag : std::uint8_t {
  U32 = 0x02,
  U64 = 0x03,
  Bit = 0x04,
  Point = 0x10,
  AheCt = 0x11,
  GcTable = 0x20,
  Labels = 0x21,
  SheCt = 0x30,
  Sealed = 0x31,
  Text = 0x40,
};

struct ItemTally {
  std::uint64_t ahe_ct = 0;
  std::uint64_t point = 0;
  std::uint64_t gc_row = 0;
  std::uint64_t label = 0;
  std::uint64_t plain_bit = 0;
  std::uint64_t she_ct = 0;
  std::uint64_t sealed = 0;

  ItemTally& operator+=(const ItemTally& o);
  bool operator==(const ItemTally&) const = default;
};

class PayloadWriter {
 public:
  explicit PayloadWriter(std::uint8_t kind) { w_.u8(kind); }

  PayloadWriter& u32(std::uint32_t v);
  PayloadWriter& u64(std::uint64_t v);
  PayloadWriter& bit(bool v);
  PayloadWriter& point(const aheg::Point& p);
  PayloadWriter& ct(const aheg::AheCiphertext& c);
  PayloadWriter& cts(std::span<const aheg::AheCiphertext> cs);
  PayloadWriter& gc(const garble::GarbledComparator& f);
  PayloadWriter& labels(std::span<const garble::WireLabel> ls, unsigned lambda);
  PayloadWriter& she(std::span<const std::uint8_t> wire_ciphertext);
  PayloadWriter& sealed(const aheg::SealedBox& box);
  PayloadWriter& text(const std::string& s);

  Bytes take() { return w_.take(); }

 private:
  ByteWriter w_;
};

class PayloadReader {
 public:
  explicit PayloadReader(std::span<const std::uint8_t> payload);

  std::uint8_t kind() const { return kind_; }
  std::uint32_t u32();
  std::uint64_t u64();
  bool bit();
  aheg::Point point();
  aheg::AheCiphertext ct();
  std::vector<aheg::AheCiphertext> cts(std::size_t count);
  garble::GarbledComparator gc();
  std::vector<garble::WireLabel> labels();
  Bytes she();
  aheg::SealedBox sealed();
  std::string text();
  void expect_end() const;
  bool at_end() const { return r_.at_end(); }

 private:
  void expect(Tag t);
  ByteReader r_;
  std::uint8_t kind_ = 0;
};

std::uint8_t payload_kind(std::span<const std::uint8_t> payload);
// Walks the item stream; throws WireError on malformed payloads.
ItemTally tally(std::span<const std::uint8_t> payload);
// Tags present in a payload, in order of appearance.
std::vector<Tag> tags(std::span<const std::uint8_t> payload);

}  // namespace skre::wire

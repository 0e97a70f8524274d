#include "skre/wire.hpp"

#include "skre/errors.hpp"

namespace skre::wire {

ItemTally& ItemTally::operator+=(const ItemTally& o) {
  ahe_ct += o.ahe_ct;
  point += o.point;
  gc_row += o.gc_row;
  label += o.label;
  plain_bit += o.plain_bit;
  she_ct += o.she_ct;
  sealed += o.sealed;
  return *this;
}

PayloadWriter& PayloadWriter::u32(std::uint32_t v) {
  w_.u8(static_cast<std::uint8_t>(Tag::U32));
  w_.u32(v);
  return *this;
}

PayloadWriter& PayloadWriter::u64(std::uint64_t v) {
  w_.u8(static_cast<std::uint8_t>(Tag::U64));
  w_.u64(v);
  return *this;
}

PayloadWriter& PayloadWriter::bit(bool v) {
  w_.u8(static_cast<std::uint8_t>(Tag::Bit));
  w_.u8(v ? 1 : 0);
  return *this;
}

PayloadWriter& PayloadWriter::point(const aheg::Point& p) {
  w_.u8(static_cast<std::uint8_t>(Tag::Point));
  w_.raw(p.to_bytes());
  return *this;
}

PayloadWriter& PayloadWriter::ct(const aheg::AheCiphertext& c) {
  w_.u8(static_cast<std::uint8_t>(Tag::AheCt));
  w_.raw(c.to_bytes());
  return *this;
}

PayloadWriter& PayloadWriter::cts(std::span<const aheg::AheCiphertext> cs) {
  for (const auto& c : cs) ct(c);
  return *this;
}

PayloadWriter& PayloadWriter::gc(const garble::GarbledComparator& f) {
  const Bytes blob = f.serialize();
  w_.u8(static_cast<std::uint8_t>(Tag::GcTable));
  w_.u32(static_cast<std::uint32_t>(blob.size()));
  w_.raw(blob);
  return *this;
}

PayloadWriter& PayloadWriter::labels(std::span<const garble::WireLabel> ls, unsigned lambda) {
  w_.u8(static_cast<std::uint8_t>(Tag::Labels));
  w_.u16(static_cast<std::uint16_t>(lambda));
  w_.u32(static_cast<std::uint32_t>(ls.size()));
  for (const auto& l : ls) garble::write_label(w_, l, lambda);
  return *this;
}

PayloadWriter& PayloadWriter::she(std::span<const std::uint8_t> wire_ciphertext) {
  w_.u8(static_cast<std::uint8_t>(Tag::SheCt));
  w_.u32(static_cast<std::uint32_t>(wire_ciphertext.size()));
  w_.raw(wire_ciphertext);
  return *this;
}

PayloadWriter& PayloadWriter::sealed(const aheg::SealedBox& box) {
  w_.u8(static_cast<std::uint8_t>(Tag::Sealed));
  w_.raw(box.ephemeral.to_bytes());
  w_.u32(static_cast<std::uint32_t>(box.body.size()));
  w_.raw(box.body);
  return *this;
}

PayloadWriter& PayloadWriter::text(const std::string& s) {
  w_.u8(static_cast<std::uint8_t>(Tag::Text));
  w_.u32(static_cast<std::uint32_t>(s.size()));
  w_.raw(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  return *this;
}

PayloadReader::PayloadReader(std::span<const std::uint8_t> payload) : r_(payload) { kind_ = r_.u8(); }

void PayloadReader::expect(Tag t) {
  const std::uint8_t got = r_.u8();
  if (got != static_cast<std::uint8_t>(t)) {
    throw WireError("payload item: expected tag " + std::to_string(static_cast<int>(t)) + ", found " + std::to_string(got));
  }
}

std::uint32_t PayloadReader::u32() {
  expect(Tag::U32);
  return r_.u32();
}

std::uint64_t PayloadReader::u64() {
  expect(Tag::U64);
  return r_.u64();
}

bool PayloadReader::bit() {
  expect(Tag::Bit);
  const std::uint8_t b = r_.u8();
  if (b > 1) throw WireError("payload item: bit out of range");
  return b == 1;
}

aheg::Point PayloadReader::point() {
  expect(Tag::Point);
  return aheg::Point::from_bytes(r_.raw(aheg::Group::instance().point_bytes()));
}

aheg::AheCiphertext PayloadReader::ct() {
  expect(Tag::AheCt);
  return aheg::AheCiphertext::from_bytes(r_.raw(aheg::AheCiphertext::wire_size()));
}

std::vector<aheg::AheCiphertext> PayloadReader::cts(std::size_t count) {
  std::vector<aheg::AheCiphertext> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ct());
  return out;
}

garble::GarbledComparator PayloadReader::gc() {
  expect(Tag::GcTable);
  const std::uint32_t len = r_.u32();
  return garble::GarbledComparator::deserialize(r_.raw(len));
}

std::vector<garble::WireLabel> PayloadReader::labels() {
  expect(Tag::Labels);
  const unsigned lambda = r_.u16();
  if (lambda != 80 && lambda != 128) throw WireError("payload item: bad label width");
  const std::uint32_t count = r_.u32();
  if (count > r_.remaining()) throw WireError("payload item: label count exceeds payload");
  std::vector<garble::WireLabel> out;
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(garble::read_label(r_, lambda));
  return out;
}

Bytes PayloadReader::she() {
  expect(Tag::SheCt);
  const std::uint32_t len = r_.u32();
  auto b = r_.raw(len);
  return {b.begin(), b.end()};
}

aheg::SealedBox PayloadReader::sealed() {
  expect(Tag::Sealed);
  aheg::SealedBox box;
  box.ephemeral = aheg::Point::from_bytes(r_.raw(aheg::Group::instance().point_bytes()));
  const std::uint32_t len = r_.u32();
  auto b = r_.raw(len);
  box.body.assign(b.begin(), b.end());
  return box;
}

std::string PayloadReader::text() {
  expect(Tag::Text);
  const std::uint32_t len = r_.u32();
  auto b = r_.raw(len);
  return {b.begin(), b.end()};
}

void PayloadReader::expect_end() const { r_.expect_end(); }

std::uint8_t payload_kind(std::span<const std::uint8_t> payload) {
  if (payload.empty()) throw WireError("empty payload");
  return payload[0];
}

namespace {

template <class Visit>
void walk(std::span<const std::uint8_t> payload, Visit&& visit) {
  ByteReader r(payload);
  r.u8();
  const std::size_t point_bytes = aheg::Group::instance().point_bytes();
  while (!r.at_end()) {
    const auto tag = static_cast<Tag>(r.u8());
    switch (tag) {
      case Tag::U32: r.raw(4); visit(tag, 1); break;
      case Tag::U64: r.raw(8); visit(tag, 1); break;
      case Tag::Bit: r.raw(1); visit(tag, 1); break;
      case Tag::Point: r.raw(point_bytes); visit(tag, 1); break;
      case Tag::AheCt: r.raw(2 * point_bytes); visit(tag, 1); break;
      case Tag::GcTable: {
        ByteReader blob(r.raw(r.u32()));
        blob.u8();
        blob.u16();
        const std::uint32_t gates = blob.u32();
        visit(tag, std::uint64_t{gates} * garble::kRowsPerAndGate);
        break;
      }
      case Tag::Labels: {
        const unsigned lambda = r.u16();
        const std::uint32_t count = r.u32();
        r.raw(std::size_t{count} * (lambda / 8));
        visit(tag, count);
        break;
      }
      case Tag::SheCt: r.raw(r.u32()); visit(tag, 1); break;
      case Tag::Sealed: r.raw(point_bytes); r.raw(r.u32()); visit(tag, 1); break;
      case Tag::Text: r.raw(r.u32()); visit(tag, 1); break;
      default: throw WireError("payload item: unknown tag " + std::to_string(static_cast<int>(tag)));
    }
  }
}

}  // namespace

ItemTally tally(std::span<const std::uint8_t> payload) {
  ItemTally t;
  walk(payload, [&](Tag tag, std::uint64_t count) {
    switch (tag) {
      case Tag::Bit: t.plain_bit += count; break;
      case Tag::Point: t.point += count; break;
      case Tag::AheCt: t.ahe_ct += count; break;
      case Tag::GcTable: t.gc_row += count; break;
      case Tag::Labels: t.label += count; break;
      case Tag::SheCt: t.she_ct += count; break;
      case Tag::Sealed: t.sealed += count; break;
      default: break;
    }
  });
  return t;
}

std::vector<Tag> tags(std::span<const std::uint8_t> payload) {
  std::vector<Tag> out;
  walk(payload, [&](Tag tag, std::uint64_t) { out.push_back(tag); });
  return out;
}

}  // namespace skre::wire

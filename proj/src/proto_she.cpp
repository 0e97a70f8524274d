#include <map>

#include "protocols.hpp"
#include "skre/messages.hpp"

namespace skre::proto {
namespace {

class SheClient final : public ClientProtocol {
 public:
  using ClientProtocol::ClientProtocol;

  std::vector<Envelope> begin() override {
    const auto& ctx = *keys_.she_context;
    const unsigned width = params_.config.mu_prime();
    Prng bit_rng = rng_.fork("she-bits");
    Prng packed_rng = rng_.fork("she-packed");
    wire::PayloadWriter w(raw(Kind::SheUpload));
    for (const auto& ct : she::encrypt_bits(ctx, x_.value, width, bit_rng)) w.she(ctx.serialize(ct));
    w.she(ctx.serialize(she::encrypt_packed(ctx, x_.value, width, packed_rng)));
    return {to_server(1, w.take())};
  }

  std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) override {
    const auto& c = params_.config;
    expect_sender(e, core::kServerId);
    switch (static_cast<Kind>(r.kind())) {
      case Kind::SheKre: {
        kre_ = r.she();
        const std::uint32_t count = r.u32();
        if (count == 0 || count > c.n) throw WireError("bad recipient list");
        std::vector<PartyId> recipients(count);
        for (auto& id : recipients) id = r.u32();
        r.expect_end();
        const Bytes partial = she::serialize_partial(she::partial_decrypt(*keys_.she_share, kre_));
        wire::PayloadWriter w(raw(Kind::SheFinalPartial));
        w.u32(count);
        for (PartyId rc : recipients) {
          Prng rng = rng_.fork("she-seal", {rc});
          w.sealed(aheg::seal(peer(rc).pk, partial, rng));
        }
        return {to_server(2, w.take())};
      }
      case Kind::SheFinal: {
        if (kre_.empty()) throw WireError("final shares before the result ciphertext");
        const std::uint32_t count = r.u32();
        if (count != c.n) throw WireError("final shares must come from all n clients");
        std::vector<she::PartialResult> partials;
        for (std::uint32_t u = 0; u < count; ++u) {
          partials.push_back(she::deserialize_partial(aheg::open(keys_.personal.sk, r.sealed())));
        }
        r.expect_end();
        const auto slots = she::combine(kre_, partials, c.n);
        output_ = core::strip_index(she::decode_packed(slots, c.mu_prime()), c.n);
        return {};
      }
      default:
        throw WireError("unexpected message " + std::string(kind_name(r.kind())));
    }
  }

 private:
  Bytes kre_;
};

class SheServer final : public ServerProtocol {
 public:
  using ServerProtocol::ServerProtocol;

  std::vector<Envelope> begin() override {
    if (!keys_.she_context) throw ConfigError("she session without an evaluation context");
    return {};
  }

  std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) override {
    const auto& c = params_.config;
    const auto& ctx = *keys_.she_context;
    switch (static_cast<Kind>(r.kind())) {
      case Kind::SheUpload: {
        Upload up;
        for (unsigned l = 0; l < c.mu_prime(); ++l) up.bits.push_back(ctx.deserialize(r.she()));
        up.packed = ctx.deserialize(r.she());
        r.expect_end();
        if (!uploads_.emplace(e.sender, std::move(up)).second) throw WireError("duplicate upload");
        if (uploads_.size() < c.n) return {};
        std::vector<std::vector<she::SlotCiphertext>> X;
        std::vector<she::SlotCiphertext> Z;
        for (const auto& [id, u] : uploads_) {
          X.push_back(u.bits);
          Z.push_back(u.packed);
        }
        const auto k_bits = she::encrypt_bits(ctx, c.k, core::ceil_log2(c.n + 1), rng_);
        const Bytes kre = ctx.serialize(she::compute_kre_she(ctx, X, Z, k_bits, params_.exec));
        wire::PayloadWriter w(raw(Kind::SheKre));
        w.she(kre).u32(c.n);
        for (PartyId id = 1; id <= c.n; ++id) w.u32(id);
        const Bytes payload = w.take();
        std::vector<Envelope> out;
        for (PartyId id = 1; id <= c.n; ++id) out.push_back(to_client(id, 1, payload));
        return out;
      }
      case Kind::SheFinalPartial: {
        const std::uint32_t count = r.u32();
        if (count != c.n) throw WireError("sealed partials must cover every client");
        std::vector<aheg::SealedBox> boxes;
        for (std::uint32_t u = 0; u < count; ++u) boxes.push_back(r.sealed());
        r.expect_end();
        if (!partials_.emplace(e.sender, std::move(boxes)).second) throw WireError("duplicate partials");
        if (partials_.size() < c.n) return {};
        std::vector<Envelope> out;
        for (PartyId q = 1; q <= c.n; ++q) {
          wire::PayloadWriter w(raw(Kind::SheFinal));
          w.u32(c.n);
          for (const auto& [from, bx] : partials_) w.sealed(bx[q - 1]);
          out.push_back(to_client(q, 2, w.take()));
        }
        done_ = true;
        return out;
      }
      default:
        throw WireError("unexpected message " + std::string(kind_name(r.kind())));
    }
  }

 private:
  struct Upload {
    std::vector<she::SlotCiphertext> bits;
    she::SlotCiphertext packed;
  };
  std::map<PartyId, Upload> uploads_;
  std::map<PartyId, std::vector<aheg::SealedBox>> partials_;
};

}  // namespace

std::unique_ptr<ClientProtocol> make_she_client(const SessionParams& p, PartyId self, ClientKeys keys, std::uint64_t input,
                                                Prng rng) {
  return std::make_unique<SheClient>(p, self, std::move(keys), input, std::move(rng));
}

std::unique_ptr<ServerProtocol> make_she_server(const SessionParams& p, ServerKeys keys, Prng rng) {
  return std::make_unique<SheServer>(p, std::move(keys), std::move(rng));
}

}  // namespace skre::proto

#include <algorithm>
#include <map>

#include "protocols.hpp"
#include "skre/compare.hpp"
#include "skre/dec_req.hpp"
#include "skre/messages.hpp"
#include "skre/session.hpp"

namespace skre::proto {
namespace {

using aheg::AheCiphertext;

class DgkClient final : public ClientProtocol {
 public:
  using ClientProtocol::ClientProtocol;

  std::vector<Envelope> begin() override {
    const unsigned width = params_.config.mu_prime();
    std::vector<AheCiphertext> bits;
    for (unsigned l = 0; l < width; ++l) {
      Prng rng = rng_.fork("dgk-bit", {l});
      bits.push_back(aheg::encrypt(keys_.personal.pk, bits_.bits[l], rng));
    }
    Prng x_rng = rng_.fork("dgk-input");
    wire::PayloadWriter w(raw(Kind::DgkUpload));
    w.ct(aheg::encrypt(keys_.common_pk, x_.value, x_rng)).cts(bits);
    return {to_server(1, w.take())};
  }

  std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) override {
    const auto& c = params_.config;
    const unsigned width = c.mu_prime();
    switch (static_cast<Kind>(r.kind())) {
      case Kind::DgkBits: {
        expect_sender(e, core::kServerId);
        const PartyId gen = r.u32(), eval = r.u32();
        if (eval != self_ || gen == self_) throw WireError("comparison addressed to the wrong evaluator");
        const auto enc_bits = r.cts(width);
        r.expect_end();
        Prng rng = rng_.fork("dgk-evaluate", {gen, eval});
        const auto reply = compare::dgk_evaluator_step(peer(gen).pk, keys_.common_pk, enc_bits, bits_, rng);
        wire::PayloadWriter w(raw(Kind::DgkReply));
        w.u32(gen).u32(eval).u32(static_cast<std::uint32_t>(reply.z.size())).cts(reply.z).ct(reply.share);
        // Sub-session flight inside round 1: the server only relays it.
        return {to_peer(gen, 1, w.take())};
      }
      case Kind::DgkReply: {
        const PartyId gen = r.u32(), eval = r.u32();
        if (gen != self_) throw WireError("reply addressed to the wrong generator");
        expect_sender(e, eval);
        compare::DgkReply reply;
        reply.z = r.cts(r.u32());
        reply.share = r.ct();
        r.expect_end();
        Prng rng = rng_.fork("dgk-generate", {gen, eval});
        const AheCiphertext bit = compare::dgk_generator_step(reply, keys_.personal.sk, keys_.common_pk, rng);
        wire::PayloadWriter w(raw(Kind::DgkResult));
        w.u32(gen).u32(eval).ct(bit);
        return {to_server(2, w.take())};
      }
      case Kind::DgkDecReq: {
        expect_sender(e, core::kServerId);
        const std::uint32_t rows = r.u32();
        if (rows != c.t) throw WireError("decryption request must hold t rows");
        std::vector<Envelope> out;
        for (std::uint32_t u = 0; u < rows; ++u) {
          const std::uint32_t j = r.u32();
          const PartyId combiner = r.u32();
          const std::uint32_t count = r.u32();
          if (count == 0 || count > c.n) throw WireError("bad decryptor set");
          std::vector<PartyId> decryptors(count);
          for (auto& id : decryptors) id = r.u32();
          const AheCiphertext y = r.ct();
          const aheg::Point partial = y.a1 * aheg::decryption_weight(*keys_.threshold_share, decryptors);
          Prng rng = rng_.fork("dgk-partial", {j});
          wire::PayloadWriter w(raw(Kind::DgkPartial));
          w.u32(j).ct(aheg::encrypt_point(peer(combiner).pk, partial, rng));
          out.push_back(to_server(3, w.take()));
        }
        r.expect_end();
        return out;
      }
      case Kind::DgkCombine: {
        expect_sender(e, core::kServerId);
        r.u32();  // logical row
        aheg::Point q = r.point();
        const std::uint32_t t = r.u32();
        if (t != c.t) throw WireError("combiner bundle must hold t partials");
        for (const auto& h : r.cts(t)) q = q - aheg::decrypt(keys_.personal.sk, h);
        const std::uint32_t count = r.u32();
        if (count == 0 || count > c.n) throw WireError("bad recipient list");
        std::vector<PartyId> recipients(count);
        for (auto& id : recipients) id = r.u32();
        r.expect_end();
        // Only the row whose rank equals k carries a bounded plaintext.
        const auto decoded = aheg::decode_bounded(q, std::uint64_t{1} << c.mu_prime());
        combiner_decoded_ = decoded.has_value();
        const std::uint64_t m = decoded.value_or(0);
        std::vector<AheCiphertext> masked;
        for (PartyId rc : recipients) {
          Prng rng = rng_.fork("dgk-mask", {rc});
          masked.push_back(aheg::encrypt(peer(rc).pk, m, rng));
        }
        wire::PayloadWriter w(raw(Kind::DgkMasked));
        w.u32(count).cts(masked);
        return {to_server(4, w.take())};
      }
      case Kind::DgkFinal: {
        expect_sender(e, core::kServerId);
        const AheCiphertext ct = r.ct();
        r.expect_end();
        finish(aheg::decrypt(keys_.personal.sk, ct));
        return {};
      }
      default:
        throw WireError("unexpected message " + std::string(kind_name(r.kind())));
    }
  }

 public:
  std::optional<bool> combiner_decoded() const { return combiner_decoded_; }

 private:
  std::optional<bool> combiner_decoded_;
};

class DgkServer final : public ServerProtocol {
 public:
  using ServerProtocol::ServerProtocol;

  std::vector<Envelope> begin() override { return {}; }

  std::vector<Envelope> peer_lost(PartyId id) override {
    if (compared_ || uploads_.count(id)) throw ProtocolAbort("client " + std::to_string(id) + " disconnected mid-protocol");
    if (!in_roster(id)) return {};
    shrink_roster(id);
    return maybe_compare();
  }

  std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) override {
    const auto& c = params_.config;
    switch (static_cast<Kind>(r.kind())) {
      case Kind::DgkUpload: {
        if (compared_ || !in_roster(e.sender)) throw WireError("unexpected upload");
        Upload up{r.ct(), r.cts(c.mu_prime())};
        r.expect_end();
        if (!uploads_.emplace(e.sender, std::move(up)).second) throw WireError("duplicate upload");
        return maybe_compare();
      }
      case Kind::DgkResult: {
        const PartyId gen = r.u32(), eval = r.u32();
        expect_sender(e, gen);
        if (!in_roster(eval) || !core::paired(position(gen), position(eval))) throw WireError("result for an unknown pair");
        AheCiphertext ct = r.ct();
        r.expect_end();
        auto& slot = G_[position(gen) - 1][position(eval) - 1];
        if (slot) throw WireError("duplicate comparison result");
        slot = std::move(ct);
        if (++results_ < expected_results_) return {};
        return send_dec_req();
      }
      case Kind::DgkPartial: {
        const std::uint32_t j = r.u32();
        if (j < 1 || j > rows_.size()) throw WireError("row index out of range");
        const auto decryptors = decryptor_positions(j, live(), c.t);
        if (std::find(decryptors.begin(), decryptors.end(), position(e.sender)) == decryptors.end()) {
          throw WireError("partial from a client outside the decryptor set");
        }
        AheCiphertext ct = r.ct();
        r.expect_end();
        store_once(partials_, {j, e.sender}, std::move(ct));
        if (partials_.size() < std::size_t{live()} * c.t) return {};
        std::vector<Envelope> out;
        for (std::uint32_t jj = 1; jj <= live(); ++jj) {
          wire::PayloadWriter w(raw(Kind::DgkCombine));
          w.u32(jj).point(rows_[jj - 1].a2).u32(c.t);
          for (auto p : decryptor_positions(jj, live(), c.t)) w.ct(partials_.at({jj, roster_[p - 1]}));
          w.u32(live());
          for (PartyId id : roster_) w.u32(id);
          out.push_back(to_client(roster_[jj - 1], 3, w.take()));
        }
        return out;
      }
      case Kind::DgkMasked: {
        if (!in_roster(e.sender)) throw WireError("masked value from outside the roster");
        const std::uint32_t count = r.u32();
        if (count != live()) throw WireError("masked values must cover every live client");
        auto cts = r.cts(count);
        r.expect_end();
        if (!masked_.emplace(e.sender, std::move(cts)).second) throw WireError("duplicate masked values");
        if (masked_.size() < live()) return {};
        std::vector<Envelope> out;
        for (std::uint32_t q = 0; q < live(); ++q) {
          AheCiphertext sum;
          for (const auto& [from, cts2] : masked_) sum = aheg::add(sum, cts2[q]);
          out.push_back(to_client(roster_[q], 4, wire::PayloadWriter(raw(Kind::DgkFinal)).ct(sum).take()));
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
    AheCiphertext x;                  // common key
    std::vector<AheCiphertext> bits;  // uploader's personal key
  };

  std::vector<Envelope> maybe_compare() {
    if (compared_ || uploads_.size() < live()) return {};
    compared_ = true;
    const std::uint32_t n = live();
    G_.assign(n, std::vector<std::optional<AheCiphertext>>(n));
    std::vector<Envelope> out;
    for (std::uint32_t u = 1; u <= n; ++u) {
      for (std::uint32_t v = 1; v <= n; ++v) {
        if (u == v || !core::paired(u, v)) continue;
        const PartyId gen = roster_[u - 1], eval = roster_[v - 1];
        wire::PayloadWriter w(raw(Kind::DgkBits));
        w.u32(gen).u32(eval).cts(uploads_.at(gen).bits);
        out.push_back(to_client(eval, 1, w.take()));
        ++expected_results_;
      }
    }
    if (expected_results_ == 0) return send_dec_req();
    return out;
  }

  std::vector<Envelope> send_dec_req() {
    const auto& c = params_.config;
    const std::uint32_t n = live();
    std::vector<AheCiphertext> X;
    std::vector<aheg::Scalar> alpha;
    for (std::uint32_t u = 0; u < n; ++u) {
      G_[u][u] = aheg::add_plain(AheCiphertext{}, aheg::Scalar::from_u64(1));
      X.push_back(uploads_.at(roster_[u]).x);
      alpha.push_back(aheg::Scalar::random_nonzero(rng_));
    }
    const auto Y = compute_kre_ahe(G_, X, c.k, alpha);
    const auto perm = rng_.permutation(n);
    rows_.clear();
    for (std::uint32_t j = 1; j <= n; ++j) rows_.push_back(Y[perm[j - 1]]);

    std::vector<Envelope> out;
    for (std::uint32_t i = 1; i <= n; ++i) {
      const auto req = dec_req(n, i, c.t, perm);
      wire::PayloadWriter w(raw(Kind::DgkDecReq));
      w.u32(static_cast<std::uint32_t>(req.rows.size()));
      for (const auto& row : req.rows) {
        w.u32(row.logical_row).u32(roster_[row.logical_row - 1]).u32(static_cast<std::uint32_t>(row.decryptors.size()));
        for (auto p : row.decryptors) w.u32(roster_[p - 1]);
        w.ct(rows_[row.logical_row - 1]);
      }
      out.push_back(to_client(roster_[i - 1], 2, w.take()));
    }
    return out;
  }

  bool compared_ = false;
  std::map<PartyId, Upload> uploads_;
  std::vector<std::vector<std::optional<AheCiphertext>>> G_;  // positions, 0-based
  std::size_t expected_results_ = 0;
  std::size_t results_ = 0;
  std::vector<AheCiphertext> rows_;  // Y permuted, by logical row
  std::map<PairKey, AheCiphertext> partials_;
  std::map<PartyId, std::vector<AheCiphertext>> masked_;
};

}  // namespace

std::optional<bool> dgk_combiner_decoded(const ClientProtocol& p) {
  const auto* c = dynamic_cast<const DgkClient*>(&p);
  return c ? c->combiner_decoded() : std::nullopt;
}

std::unique_ptr<ClientProtocol> make_dgk_client(const SessionParams& p, PartyId self, ClientKeys keys, std::uint64_t input,
                                                Prng rng) {
  return std::make_unique<DgkClient>(p, self, std::move(keys), input, std::move(rng));
}

std::unique_ptr<ServerProtocol> make_dgk_server(const SessionParams& p, ServerKeys keys, Prng rng) {
  return std::make_unique<DgkServer>(p, std::move(keys), std::move(rng));
}

}  // namespace skre::proto

#include <algorithm>
#include <map>

#include "protocols.hpp"
#include "skre/compare.hpp"
#include "skre/dec_req.hpp"
#include "skre/kernels.hpp"
#include "skre/messages.hpp"
#include "skre/session.hpp"

namespace skre::proto {
namespace {

using aheg::AheCiphertext;

std::vector<PartyId> read_ids(wire::PayloadReader& r, std::uint32_t max_count) {
  const std::uint32_t count = r.u32();
  if (count == 0 || count > max_count) throw WireError("bad id list length");
  std::vector<PartyId> ids(count);
  for (auto& id : ids) id = r.u32();
  return ids;
}

class LinClient final : public ClientProtocol {
 public:
  using ClientProtocol::ClientProtocol;

  std::vector<Envelope> begin() override {
    const aheg::Point& pk = keys_.common_pk;
    Prng enc_rng = rng_.fork("lin-encoding");
    const auto encoding = core::encode_zero_one(x_, enc_rng);
    Prng ct_rng = rng_.fork("lin-encrypt");
    const auto encrypted = compare::encrypt_encoding(pk, encoding, ct_rng);
    Prng x_rng = rng_.fork("lin-input");
    wire::PayloadWriter w(raw(Kind::LinUpload));
    w.ct(aheg::encrypt(pk, x_.value, x_rng)).cts(encrypted.v0).cts(encrypted.v1);
    return {to_server(1, w.take())};
  }

  std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) override {
    const auto& c = params_.config;
    switch (static_cast<Kind>(r.kind())) {
      case Kind::LinDecReq: {
        expect_sender(e, core::kServerId);
        const std::uint32_t rows = r.u32();
        if (rows != c.t) throw WireError("decryption request must hold t rows");
        std::vector<Envelope> out;
        for (std::uint32_t u = 0; u < rows; ++u) {
          const std::uint32_t j = r.u32();
          const PartyId combiner = r.u32();
          const auto decryptors = read_ids(r, c.n);
          const std::uint32_t count = r.u32();
          const auto cts = r.cts(count);
          const aheg::Scalar weight = aheg::decryption_weight(*keys_.threshold_share, decryptors);
          Prng rng = rng_.fork("lin-partial", {j});
          std::vector<aheg::Scalar> rs;
          rs.reserve(count);
          for (std::uint32_t q = 0; q < count; ++q) rs.push_back(aheg::Scalar::random_nonzero(rng));
          const auto sealed = kernels::partial_points_sealed(weight, cts, peer(combiner).pk, rs, params_.exec);
          wire::PayloadWriter w(raw(Kind::LinPartialRow));
          w.u32(j).u32(count).cts(sealed);
          out.push_back(to_server(2, w.take()));
        }
        r.expect_end();
        return out;
      }
      case Kind::LinCombine: {
        expect_sender(e, core::kServerId);
        const std::uint32_t j = r.u32();
        const AheCiphertext input = r.ct();
        const std::uint32_t cols = r.u32();
        const std::uint32_t width = c.mu_prime();
        std::vector<aheg::Point> q(std::size_t{cols} * width);
        for (auto& p : q) p = r.point();
        const std::uint32_t t = r.u32();
        if (t != c.t) throw WireError("combiner bundle must hold t partial rows");
        for (std::uint32_t u = 0; u < t; ++u) {
          r.u32();  // decryptor id, informational
          const auto sealed = r.cts(q.size());
          const auto partial = kernels::decrypt_all(keys_.personal.sk, sealed, params_.exec);
          for (std::size_t e2 = 0; e2 < q.size(); ++e2) q[e2] = q[e2] - partial[e2];
        }
        r.expect_end();
        // b_jv = 1 iff column v holds a zero; the diagonal block always does.
        std::uint32_t rank = 0;
        for (std::uint32_t v = 0; v < cols; ++v) {
          bool zero = false;
          for (std::uint32_t l = 0; l < width; ++l) zero = zero || aheg::is_zero(q[std::size_t{v} * width + l]);
          rank += zero ? 1 : 0;
        }
        last_rank_ = rank;
        Prng rng = rng_.fork("lin-ctilde", {j});
        const AheCiphertext zero_ct = aheg::encrypt(keys_.common_pk, 0, rng);
        const AheCiphertext ctilde = rank == c.k ? aheg::add(input, zero_ct) : zero_ct;
        wire::PayloadWriter w(raw(Kind::LinCtilde));
        w.u32(j).ct(ctilde);
        return {to_server(3, w.take())};
      }
      case Kind::LinKre: {
        expect_sender(e, core::kServerId);
        const AheCiphertext kre = r.ct();
        const auto decryptors = read_ids(r, c.n);
        const auto recipients = read_ids(r, c.n);
        r.expect_end();
        const aheg::Scalar weight = aheg::decryption_weight(*keys_.threshold_share, decryptors);
        const aheg::Point partial = kre.a1 * weight;
        std::vector<AheCiphertext> out_cts;
        for (PartyId rc : recipients) {
          Prng rng = rng_.fork("lin-final", {rc});
          out_cts.push_back(aheg::encrypt_point(peer(rc).pk, partial, rng));
        }
        wire::PayloadWriter w(raw(Kind::LinFinalPartial));
        w.u32(static_cast<std::uint32_t>(out_cts.size())).cts(out_cts);
        return {to_server(4, w.take())};
      }
      case Kind::LinFinal: {
        expect_sender(e, core::kServerId);
        aheg::Point q = r.point();
        const std::uint32_t t = r.u32();
        if (t != c.t) throw WireError("final shares must number t");
        for (const auto& h : r.cts(t)) q = q - aheg::decrypt(keys_.personal.sk, h);
        r.expect_end();
        finish(q);
        return {};
      }
      default:
        throw WireError("unexpected message " + std::string(kind_name(r.kind())));
    }
  }

  std::optional<std::uint32_t> last_rank() const { return last_rank_; }

 private:
  std::optional<std::uint32_t> last_rank_;
};

class LinServer final : public ServerProtocol {
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
    const std::uint32_t width = c.mu_prime();
    switch (static_cast<Kind>(r.kind())) {
      case Kind::LinUpload: {
        if (compared_ || !in_roster(e.sender)) throw WireError("unexpected upload");
        Upload up;
        up.x = r.ct();
        up.enc.v0 = r.cts(width);
        up.enc.v1 = r.cts(width);
        r.expect_end();
        if (!uploads_.emplace(e.sender, std::move(up)).second) throw WireError("duplicate upload");
        return maybe_compare();
      }
      case Kind::LinPartialRow: {
        const std::uint32_t j = r.u32();
        check_row(j);
        const auto decryptors = decryptor_positions(j, live(), c.t);
        const std::uint32_t pos = position(e.sender);
        if (std::find(decryptors.begin(), decryptors.end(), pos) == decryptors.end()) {
          throw WireError("partial row from a client outside the decryptor set");
        }
        const std::uint32_t count = r.u32();
        if (count != rows_[j - 1].cts.size()) throw WireError("partial row has the wrong length");
        auto cts = r.cts(count);
        r.expect_end();
        store_once(partials_, {j, e.sender}, std::move(cts));
        if (partials_.size() < std::size_t{live()} * c.t) return {};
        return send_combines();
      }
      case Kind::LinCtilde: {
        const std::uint32_t j = r.u32();
        check_row(j);
        expect_sender(e, roster_[j - 1]);
        AheCiphertext ct = r.ct();
        r.expect_end();
        store_once(ctilde_, {j, e.sender}, std::move(ct));
        if (ctilde_.size() < live()) return {};
        AheCiphertext kre;
        for (const auto& [key, ct2] : ctilde_) kre = aheg::add(kre, ct2);
        kre_ = kre;
        auto order = rng_.permutation(live());
        subset_.clear();
        for (std::uint32_t u = 0; u < c.t; ++u) subset_.push_back(roster_[order[u]]);
        std::sort(subset_.begin(), subset_.end());
        wire::PayloadWriter w(raw(Kind::LinKre));
        w.ct(kre).u32(c.t);
        for (PartyId id : subset_) w.u32(id);
        w.u32(live());
        for (PartyId id : roster_) w.u32(id);
        const Bytes payload = w.take();
        std::vector<Envelope> out;
        for (PartyId id : subset_) out.push_back(to_client(id, 3, payload));
        return out;
      }
      case Kind::LinFinalPartial: {
        if (std::find(subset_.begin(), subset_.end(), e.sender) == subset_.end()) {
          throw WireError("final partial from outside the decryption subset");
        }
        const std::uint32_t count = r.u32();
        if (count != live()) throw WireError("final partial must cover every live client");
        auto cts = r.cts(count);
        r.expect_end();
        if (!finals_.emplace(e.sender, std::move(cts)).second) throw WireError("duplicate final partial");
        if (finals_.size() < c.t) return {};
        std::vector<Envelope> out;
        for (std::uint32_t q = 0; q < live(); ++q) {
          wire::PayloadWriter w(raw(Kind::LinFinal));
          w.point(kre_.a2).u32(c.t);
          for (PartyId id : subset_) w.ct(finals_.at(id)[q]);
          out.push_back(to_client(roster_[q], 4, w.take()));
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
    AheCiphertext x;
    compare::EncryptedEncoding enc;
  };
  struct LogicalRow {
    AheCiphertext input;             // c_j
    std::vector<AheCiphertext> cts;  // n' blocks of width mu', columns permuted
  };

  void check_row(std::uint32_t j) const {
    if (j < 1 || j > rows_.size()) throw WireError("row index out of range");
  }

  std::vector<Envelope> maybe_compare() {
    if (compared_ || uploads_.size() < live()) return {};
    compared_ = true;
    const auto& c = params_.config;
    const std::uint32_t n = live();
    const std::uint32_t width = c.mu_prime();

    std::vector<compare::EncryptedEncoding> enc;
    for (PartyId id : roster_) enc.push_back(uploads_.at(id).enc);
    std::vector<kernels::OrderedPair> pairs;
    std::vector<compare::LinCompareRandomness> rnd;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (u == v) continue;
        pairs.push_back({u, v});
        rnd.push_back(compare::LinCompareRandomness::draw(width, rng_));
      }
    }
    const auto compared = kernels::lin_compare_pairs(enc, pairs, rnd, params_.exec);

    std::vector<std::vector<std::vector<AheCiphertext>>> G(n, std::vector<std::vector<AheCiphertext>>(n));
    for (std::size_t p = 0; p < pairs.size(); ++p) G[pairs[p].row][pairs[p].col] = compared[p];
    // Diagonal: a block with exactly one zero, so the combiner counts b_jj = 1.
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t zero_at = rng_.uniform(width);
      for (std::size_t l = 0; l < width; ++l) {
        const aheg::Scalar m = l == zero_at ? aheg::Scalar() : aheg::Scalar::random_nonzero(rng_);
        G[u][u].push_back(aheg::encrypt(keys_.common_pk, m, rng_));
      }
    }

    const auto row_perm = rng_.permutation(n);
    std::vector<std::vector<AheCiphertext>> permuted(n);
    for (std::size_t w = 0; w < n; ++w) {
      const auto col_perm = rng_.permutation(n);
      for (std::size_t v = 0; v < n; ++v) {
        const auto& block = G[w][col_perm[v]];
        permuted[w].insert(permuted[w].end(), block.begin(), block.end());
      }
    }
    rows_.clear();
    for (std::uint32_t j = 1; j <= n; ++j) {
      const std::size_t w = row_perm[j - 1];
      rows_.push_back({uploads_.at(roster_[w]).x, permuted[w]});
    }

    std::vector<Envelope> out;
    for (std::uint32_t i = 1; i <= n; ++i) {
      const auto req = dec_req(n, i, c.t, row_perm);
      wire::PayloadWriter w(raw(Kind::LinDecReq));
      w.u32(static_cast<std::uint32_t>(req.rows.size()));
      for (const auto& row : req.rows) {
        w.u32(row.logical_row).u32(roster_[row.logical_row - 1]).u32(static_cast<std::uint32_t>(row.decryptors.size()));
        for (auto p : row.decryptors) w.u32(roster_[p - 1]);
        const auto& cts = rows_[row.logical_row - 1].cts;
        w.u32(static_cast<std::uint32_t>(cts.size())).cts(cts);
      }
      out.push_back(to_client(roster_[i - 1], 1, w.take()));
    }
    return out;
  }

  std::vector<Envelope> send_combines() {
    const auto& c = params_.config;
    const std::uint32_t n = live();
    std::vector<Envelope> out;
    for (std::uint32_t j = 1; j <= n; ++j) {
      const auto& row = rows_[j - 1];
      wire::PayloadWriter w(raw(Kind::LinCombine));
      w.u32(j).ct(row.input).u32(n);
      for (const auto& ct : row.cts) w.point(ct.a2);
      w.u32(c.t);
      for (auto p : decryptor_positions(j, n, c.t)) {
        const PartyId id = roster_[p - 1];
        w.u32(id).cts(partials_.at({j, id}));
      }
      out.push_back(to_client(roster_[j - 1], 2, w.take()));
    }
    return out;
  }

  bool compared_ = false;
  std::map<PartyId, Upload> uploads_;
  std::vector<LogicalRow> rows_;
  std::map<PairKey, std::vector<AheCiphertext>> partials_;  // (row, decryptor id)
  std::map<PairKey, AheCiphertext> ctilde_;
  AheCiphertext kre_;
  std::vector<PartyId> subset_;
  std::map<PartyId, std::vector<AheCiphertext>> finals_;
};

}  // namespace

std::optional<std::uint32_t> lin_combiner_rank(const ClientProtocol& p) {
  const auto* c = dynamic_cast<const LinClient*>(&p);
  return c ? c->last_rank() : std::nullopt;
}

std::unique_ptr<ClientProtocol> make_lin_client(const SessionParams& p, PartyId self, ClientKeys keys, std::uint64_t input,
                                                Prng rng) {
  return std::make_unique<LinClient>(p, self, std::move(keys), input, std::move(rng));
}

std::unique_ptr<ServerProtocol> make_lin_server(const SessionParams& p, ServerKeys keys, Prng rng) {
  return std::make_unique<LinServer>(p, std::move(keys), std::move(rng));
}

}  // namespace skre::proto

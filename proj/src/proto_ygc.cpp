#include <map>

#include "protocols.hpp"
#include "skre/garble.hpp"
#include "skre/kernels.hpp"
#include "skre/messages.hpp"

namespace skre::proto {
namespace {

using aheg::AheCiphertext;
using garble::WireLabel;

class YgcClient final : public ClientProtocol {
 public:
  using ClientProtocol::ClientProtocol;

  std::vector<Envelope> begin() override {
    const auto& c = params_.config;
    std::vector<Envelope> out;
    for (PartyId j = 1; j <= c.n; ++j) {
      if (j == self_) continue;
      const bool head = core::paired(self_, j);
      const PairKey key = head ? PairKey{self_, j} : PairKey{j, self_};
      const bool blind = rng_.fork("ygc-blind", {key.first, key.second}).bit();
      blinds_[j] = blind;
      // Both ends derive the same garbling from the shared DH seed; the tail only needs its labels.
      const auto g = garble::garble(garble::dh_seed(keys_.dh.sk, peer(j).dh, c.lambda), c.mu_prime(), c.lambda);
      const auto labels = garble::encode(g.encoding, head ? garble::Side::Generator : garble::Side::Evaluator, blind, bits_);
      if (head) {
        wire::PayloadWriter w(raw(Kind::YgcGarbled));
        w.u32(key.first).u32(key.second).gc(g.circuit).labels(labels, c.lambda);
        out.push_back(to_server(1, w.take()));
      } else {
        wire::PayloadWriter w(raw(Kind::YgcEvalInput));
        w.u32(key.first).u32(key.second).labels(labels, c.lambda);
        out.push_back(to_server(1, w.take()));
      }
    }
    return out;
  }

  std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) override {
    switch (static_cast<Kind>(r.kind())) {
      case Kind::YgcBlinded: {
        expect_sender(e, core::kServerId);
        const PartyId h = r.u32(), t = r.u32();
        const bool blinded = r.bit();
        r.expect_end();
        const PartyId partner = partner_of(h, t);
        Prng rng = rng_.fork("ygc-half-unblind", {h, t});
        const AheCiphertext ct = aheg::encrypt(keys_.personal.pk, blinded != blinds_.at(partner) ? 1u : 0u, rng);
        wire::PayloadWriter w(raw(Kind::YgcHalfUnblind));
        w.u32(h).u32(t).ct(ct);
        return {to_peer(partner, 2, w.take())};
      }
      case Kind::YgcHalfUnblind: {
        const PartyId h = r.u32(), t = r.u32();
        const PartyId partner = partner_of(h, t);
        expect_sender(e, partner);
        const AheCiphertext ct = r.ct();
        r.expect_end();
        // ct encrypts b XOR our blind under the partner's key.
        Prng rng = rng_.fork("ygc-unblind", {h, t});
        wire::PayloadWriter w(raw(Kind::YgcUnblinded));
        w.u32(h).u32(t).ct(aheg::xor_plain(ct, blinds_.at(partner), peer(partner).pk, rng));
        return {to_server(3, w.take())};
      }
      case Kind::YgcBeta: {
        expect_sender(e, core::kServerId);
        const AheCiphertext beta = r.ct();
        r.expect_end();
        const bool selected = aheg::is_zero(aheg::decrypt(keys_.personal.sk, beta));
        const std::uint64_t m = selected ? x_.value : 0;
        std::vector<AheCiphertext> masked;
        for (PartyId c = 1; c <= params_.config.n; ++c) {
          Prng rng = rng_.fork("ygc-mask", {c});
          masked.push_back(aheg::encrypt(peer(c).pk, m, rng));
        }
        wire::PayloadWriter w(raw(Kind::YgcMasked));
        w.cts(masked);
        return {to_server(4, w.take())};
      }
      case Kind::YgcResult: {
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

 private:
  PartyId partner_of(PartyId h, PartyId t) const {
    if (h == self_ && t != self_) return t;
    if (t == self_ && h != self_) return h;
    throw WireError("message for a pair this client is not part of");
  }

  std::map<PartyId, bool> blinds_;  // per partner; the pair id follows from paired()
};

class YgcServer final : public ServerProtocol {
 public:
  using ServerProtocol::ServerProtocol;

  std::vector<Envelope> begin() override {
    const std::uint32_t n = params_.config.n;
    pairs_ = std::size_t{n} * (n - 1) / 2;
    return {};
  }

  std::vector<Envelope> handle(const Envelope& e, wire::PayloadReader& r) override {
    const auto& c = params_.config;
    switch (static_cast<Kind>(r.kind())) {
      case Kind::YgcGarbled: {
        const PairKey key = read_pair(r);
        expect_sender(e, key.first);
        Circuit entry{r.gc(), r.labels()};
        r.expect_end();
        if (entry.circuit.mu_prime != c.mu_prime() || entry.circuit.lambda != c.lambda) {
          throw WireError("garbled circuit has the wrong shape");
        }
        check_labels(entry.generator);
        store_once(circuits_, key, std::move(entry));
        return maybe_evaluate();
      }
      case Kind::YgcEvalInput: {
        const PairKey key = read_pair(r);
        expect_sender(e, key.second);
        auto labels = r.labels();
        r.expect_end();
        check_labels(labels);
        store_once(evaluator_labels_, key, std::move(labels));
        return maybe_evaluate();
      }
      case Kind::YgcUnblinded: {
        const PairKey key = read_pair(r);
        if (e.sender != key.first && e.sender != key.second) throw WireError("unblinded bit from outside the pair");
        AheCiphertext ct = r.ct();
        r.expect_end();
        // From the tail it is under the head's key and vice versa.
        store_once(e.sender == key.second ? under_head_ : under_tail_, key, std::move(ct));
        if (under_head_.size() < pairs_ || under_tail_.size() < pairs_) return {};
        return send_betas();
      }
      case Kind::YgcMasked: {
        auto cts = r.cts(c.n);
        r.expect_end();
        if (!masked_.emplace(e.sender, std::move(cts)).second) throw WireError("duplicate masked values");
        if (masked_.size() < c.n) return {};
        std::vector<Envelope> out;
        for (PartyId i = 1; i <= c.n; ++i) {
          AheCiphertext sum;
          for (const auto& [from, cts_from] : masked_) sum = aheg::add(sum, cts_from[i - 1]);
          out.push_back(to_client(i, 4, wire::PayloadWriter(raw(Kind::YgcResult)).ct(sum).take()));
        }
        done_ = true;
        return out;
      }
      default:
        throw WireError("unexpected message " + std::string(kind_name(r.kind())));
    }
  }

 private:
  struct Circuit {
    garble::GarbledComparator circuit;
    std::vector<WireLabel> generator;
  };

  PairKey read_pair(wire::PayloadReader& r) const {
    const PartyId h = r.u32(), t = r.u32();
    if (h < 1 || t < 1 || h > params_.config.n || t > params_.config.n || h == t || !core::paired(h, t)) {
      throw WireError("invalid comparison pair");
    }
    return {h, t};
  }

  void check_labels(const std::vector<WireLabel>& labels) const {
    if (labels.size() != params_.config.mu_prime() + 1) throw WireError("wrong number of input labels");
  }

  std::vector<Envelope> maybe_evaluate() {
    if (circuits_.size() < pairs_ || evaluator_labels_.size() < pairs_) return {};
    std::vector<kernels::ComparatorJob> jobs;
    std::vector<PairKey> keys;
    for (const auto& [key, entry] : circuits_) {
      jobs.push_back({&entry.circuit, entry.generator, evaluator_labels_.at(key)});
      keys.push_back(key);
    }
    const auto blinded = kernels::evaluate_comparators(jobs, params_.exec);
    std::vector<Envelope> out;
    for (std::size_t p = 0; p < keys.size(); ++p) {
      const auto [h, t] = keys[p];
      wire::PayloadWriter w(raw(Kind::YgcBlinded));
      w.u32(h).u32(t).bit(blinded[p]);
      const Bytes payload = w.take();
      out.push_back(to_client(h, 1, payload));
      out.push_back(to_client(t, 1, payload));
    }
    circuits_.clear();
    evaluator_labels_.clear();
    return out;
  }

  std::vector<Envelope> send_betas() {
    const auto& c = params_.config;
    const aheg::Scalar one = aheg::Scalar::from_u64(1);
    std::vector<Envelope> out;
    for (PartyId i = 1; i <= c.n; ++i) {
      AheCiphertext rank = aheg::add_plain(AheCiphertext{}, one);  // b_ii = 1
      for (PartyId j = 1; j <= c.n; ++j) {
        if (j == i) continue;
        if (core::paired(i, j)) {
          rank = aheg::add(rank, under_head_.at({i, j}));
        } else {
          rank = aheg::add(rank, aheg::add_plain(aheg::negate(under_tail_.at({j, i})), one));
        }
      }
      const aheg::Scalar alpha = aheg::Scalar::random_nonzero(rng_);
      const AheCiphertext beta = aheg::scalar_mul(aheg::add_plain(rank, -aheg::Scalar::from_u64(c.k)), alpha);
      out.push_back(to_client(i, 3, wire::PayloadWriter(raw(Kind::YgcBeta)).ct(beta).take()));
    }
    return out;
  }

  std::size_t pairs_ = 0;
  std::map<PairKey, Circuit> circuits_;
  std::map<PairKey, std::vector<WireLabel>> evaluator_labels_;
  std::map<PairKey, AheCiphertext> under_head_;  // Enc_head(b_ht)
  std::map<PairKey, AheCiphertext> under_tail_;  // Enc_tail(b_ht)
  std::map<PartyId, std::vector<AheCiphertext>> masked_;
};

}  // namespace

std::unique_ptr<ClientProtocol> make_ygc_client(const SessionParams& p, PartyId self, ClientKeys keys, std::uint64_t input,
                                                Prng rng) {
  return std::make_unique<YgcClient>(p, self, std::move(keys), input, std::move(rng));
}

std::unique_ptr<ServerProtocol> make_ygc_server(const SessionParams& p, ServerKeys keys, Prng rng) {
  return std::make_unique<YgcServer>(p, std::move(keys), std::move(rng));
}

}  // namespace skre::proto

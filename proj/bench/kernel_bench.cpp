// Serial vs OpenMP timings of the batch kernels. Arg 0 selects Exec::Serial, 1 Exec::Parallel.
#include <benchmark/benchmark.h>

#include "skre/kernels.hpp"
#include "skre/she.hpp"

namespace {

using namespace skre;

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

struct LinBatch {
  std::vector<compare::EncryptedEncoding> enc;
  std::vector<kernels::OrderedPair> pairs;
  std::vector<compare::LinCompareRandomness> rnd;

  LinBatch(std::size_t n, unsigned w) {
    Prng rng = Prng::from_seed(1, "bench-lin");
    const auto kp = aheg::keygen(rng);
    for (std::size_t i = 0; i < n; ++i) {
      enc.push_back(compare::encrypt_encoding(kp.pk, core::encode_zero_one({rng.uniform(1u << w), w}, rng), rng));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        pairs.push_back({i, j});
        rnd.push_back(compare::LinCompareRandomness::draw(w, rng));
      }
    }
  }
};

void BM_LinComparePairs(benchmark::State& state) {
  static const LinBatch batch(8, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::lin_compare_pairs(batch.enc, batch.pairs, batch.rnd, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.pairs.size()));
}
BENCHMARK(BM_LinComparePairs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PartialPoints(benchmark::State& state) {
  Prng rng = Prng::from_seed(2, "bench-partial");
  const auto key = aheg::threshold_keygen(5, 2, rng);
  std::vector<aheg::AheCiphertext> cts;
  for (int i = 0; i < 512; ++i) cts.push_back(aheg::encrypt(key.pk, static_cast<std::uint64_t>(i), rng));
  const std::vector<std::uint32_t> set = {1, 2};
  const auto w = aheg::decryption_weight(key.shares[0], set);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::partial_points(w, cts, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cts.size()));
}
BENCHMARK(BM_PartialPoints)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvaluateComparators(benchmark::State& state) {
  Prng rng = Prng::from_seed(3, "bench-gc");
  constexpr unsigned w = 24;
  std::vector<garble::Garbling> gs;
  std::vector<std::vector<garble::WireLabel>> gen, eva;
  for (int i = 0; i < 256; ++i) {
    garble::SharedSeed s;
    rng.fill(s.key);
    gs.push_back(garble::garble(s, w, 128));
    gen.push_back(garble::encode(gs.back().encoding, garble::Side::Generator, rng.bit(), core::BitVector::of(rng.uniform(1u << w), w)));
    eva.push_back(garble::encode(gs.back().encoding, garble::Side::Evaluator, rng.bit(), core::BitVector::of(rng.uniform(1u << w), w)));
  }
  std::vector<kernels::ComparatorJob> jobs;
  for (std::size_t i = 0; i < gs.size(); ++i) jobs.push_back({&gs[i].circuit, gen[i], eva[i]});
  for (auto _ : state) benchmark::DoNotOptimize(kernels::evaluate_comparators(jobs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(jobs.size()));
}
BENCHMARK(BM_EvaluateComparators)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SheRankSelection(benchmark::State& state) {
  Prng rng = Prng::from_seed(4, "bench-she");
  constexpr std::uint32_t n = 12;
  constexpr unsigned w = 16;
  const auto keys = she::debug_keygen(n, she::default_slot_count(w), w + n + 1, rng);
  const auto& b = *keys.context;
  std::vector<std::vector<she::SlotCiphertext>> X;
  std::vector<she::SlotCiphertext> Z;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t x = (rng.uniform(1u << (w - 4)) << 4) | i;
    X.push_back(she::encrypt_bits(b, x, w, rng));
    Z.push_back(she::encrypt_packed(b, x, w, rng));
  }
  const auto kb = she::encrypt_bits(b, n / 2, core::ceil_log2(n + 1), rng);
  for (auto _ : state) benchmark::DoNotOptimize(she::compute_kre_she(b, X, Z, kb, exec_of(state)));
}
BENCHMARK(BM_SheRankSelection)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

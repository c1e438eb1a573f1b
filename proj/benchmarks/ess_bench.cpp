#include <benchmark/benchmark.h>

#include <random>

#include "ess/codec.hpp"
#include "ess/fibersim.hpp"
#include "ess/link.hpp"
#include "ess/metrics.hpp"
#include "ess/trellis.hpp"

namespace {

using namespace ess;

const TrellisParams& sphere() {
  static const TrellisParams p = TrellisParams::make(108, Alphabet({1, 3, 5, 7}), 860);
  return p;
}

const Trellis& sphere_trellis() {
  static const Trellis t = build_full_trellis(sphere());
  return t;
}

void BM_BuildFullTrellis(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_full_trellis(sphere()));
}
BENCHMARK(BM_BuildFullTrellis)->Unit(benchmark::kMillisecond);

void BM_BuildBandTrellis(benchmark::State& state) {
  const auto p = TrellisParams::make(108, Alphabet({1, 3, 5, 7}), 932);
  for (auto _ : state) benchmark::DoNotOptimize(build_band_trellis(p, {16, 1}));
}
BENCHMARK(BM_BuildBandTrellis)->Unit(benchmark::kMillisecond);

void BM_CountSequences(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(count_sequences(sphere()));
}
BENCHMARK(BM_CountSequences)->Unit(benchmark::kMillisecond);

void BM_ExactMetrics(benchmark::State& state) {
  const auto& t = sphere_trellis();
  for (auto _ : state) benchmark::DoNotOptimize(exact_metrics(t));
}
BENCHMARK(BM_ExactMetrics)->Unit(benchmark::kMillisecond);

BitBlock random_block(std::mt19937_64& rng, int k) {
  BitBlock bits(static_cast<std::size_t>(k));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
  return bits;
}

void BM_Shape(benchmark::State& state) {
  const auto& t = sphere_trellis();
  std::mt19937_64 rng(1);
  const auto bits = random_block(rng, max_shaping_bits(t));
  for (auto _ : state) benchmark::DoNotOptimize(shape(t, bits));
  state.SetItemsProcessed(state.iterations() * t.length());
}
BENCHMARK(BM_Shape);

void BM_Deshape(benchmark::State& state) {
  const auto& t = sphere_trellis();
  std::mt19937_64 rng(2);
  const auto seq = shape(t, random_block(rng, max_shaping_bits(t)));
  for (auto _ : state) benchmark::DoNotOptimize(deshape(t, seq));
  state.SetItemsProcessed(state.iterations() * t.length());
}
BENCHMARK(BM_Deshape);

// One 205 km span for a 2^12-symbol burst at sps 16.
void BM_SsfmSpan(benchmark::State& state) {
  const double step_km = static_cast<double>(state.range(0)) / 10.0;
  std::mt19937_64 rng(3);
  std::vector<Complex> symbols(4096);
  for (auto& s : symbols) s = {rng() & 1 ? 1.0 : -1.0, rng() & 1 ? 1.0 : -1.0};
  const auto wf = modulate(symbols, 16, rrc_taps(0.1, 64, 16), 50e9, Boundary::circular);
  const FiberParams fiber;
  for (auto _ : state) benchmark::DoNotOptimize(ssfm_span(wf, fiber, step_km, dbm_to_watt(6.0)));
}
BENCHMARK(BM_SsfmSpan)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

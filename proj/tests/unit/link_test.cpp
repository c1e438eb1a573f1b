#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ess/codec.hpp"
#include "ess/errors.hpp"
#include "ess/link.hpp"

namespace ess {
namespace {

const Alphabet& alphabet() {
  static const Alphabet a({1, 3, 5, 7});
  return a;
}

// Sphere at rate 1.5 and the band trellis the search settles on for it.
const Trellis& ess_trellis() {
  static const Trellis t = build_full_trellis(TrellisParams::make(108, alphabet(), 860));
  return t;
}
const Trellis& bess_trellis() {
  static const Trellis t = build_band_trellis(TrellisParams::make(108, alphabet(), 932), {16, 1});
  return t;
}

double snr(const Trellis& t, const LinkParams& link, const FiberParams& fiber) {
  const auto i = draw_shaped_amplitudes(t, link.burst_symbols, 2 * link.seed);
  const auto q = draw_shaped_amplitudes(t, link.burst_symbols, 2 * link.seed + 1);
  return run_link(i, q, link, fiber).effective_snr_db;
}

LinkParams fast_link() {
  LinkParams l;
  l.step_km = 1.0;
  return l;
}

TEST(PowerSweep, Parses) {
  EXPECT_EQ(parse_power_sweep("-2:1:8").size(), 11u);
  EXPECT_EQ(parse_power_sweep("-2:1:8").front(), -2.0);
  EXPECT_EQ(parse_power_sweep("-2:1:8").back(), 8.0);
  EXPECT_EQ(parse_power_sweep("0:0.5:1"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(parse_power_sweep("3"), (std::vector<double>{3.0}));
  EXPECT_THROW(parse_power_sweep("1:0:3"), ParameterError);
  EXPECT_THROW(parse_power_sweep("3:1:1"), ParameterError);
  EXPECT_THROW(parse_power_sweep("a:1:2"), ParameterError);
  EXPECT_THROW(parse_power_sweep("1:2"), ParameterError);
  EXPECT_THROW(parse_power_sweep("1:1:2:3"), ParameterError);
}

TEST(DrawAmplitudes, ShapedBlocksAreUsedCodewords) {
  const auto& t = ess_trellis();
  const auto a = draw_shaped_amplitudes(t, 108 * 20 + 7, 5);
  ASSERT_EQ(a.size(), 108u * 20u + 7u);
  EXPECT_EQ(a, draw_shaped_amplitudes(t, 108 * 20 + 7, 5));
  for (int b = 0; b < 20; ++b) {
    const std::span<const int> block(a.data() + 108 * b, 108);
    EXPECT_NO_THROW(deshape(t, block));
  }
}

TEST(DrawAmplitudes, Uniform) {
  const auto a = draw_uniform_amplitudes(alphabet(), 40000, 3);
  std::vector<int> counts(8, 0);
  for (int v : a) {
    ASSERT_TRUE(alphabet().contains(v));
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int v : {1, 3, 5, 7}) EXPECT_NEAR(counts[static_cast<std::size_t>(v)], 10000, 400);
}

TEST(RunLink, RejectsShortInput) {
  const std::vector<int> few(100, 1);
  EXPECT_THROW(run_link(few, few, LinkParams{}, FiberParams{}), LengthError);
}

TEST(RunLink, DeterministicPerSeed) {
  LinkParams l = fast_link();
  l.burst_symbols = 4096;
  l.launch_power_dbm = 6.0;
  EXPECT_EQ(snr(ess_trellis(), l, FiberParams{}), snr(ess_trellis(), l, FiberParams{}));
}

TEST(RunLink, AseLimitedWithoutNonlinearity) {
  FiberParams f;
  f.gamma_per_w_km = 0.0;
  LinkParams l;
  l.step_km = f.length_km;  // linear propagation is exact in one step
  for (double p : {0.0, 4.0}) {
    l.launch_power_dbm = p;
    EXPECT_NEAR(snr(ess_trellis(), l, f), ase_limited_snr_db(l, f), 0.15) << p << " dBm";
  }
}

TEST(RunLink, LinearRegimeDoublingPower) {
  LinkParams l = fast_link();
  l.burst_symbols = 8192;
  l.launch_power_dbm = -8.0;
  const double low = snr(ess_trellis(), l, FiberParams{});
  l.launch_power_dbm = -8.0 + 10.0 * std::log10(2.0);
  const double high = snr(ess_trellis(), l, FiberParams{});
  EXPECT_NEAR(high - low, 3.0103, 0.2);
}

TEST(RunLink, ShapingInvisibleWithoutNonlinearity) {
  FiberParams f;
  f.gamma_per_w_km = 0.0;
  LinkParams l;
  l.step_km = f.length_km;
  l.launch_power_dbm = 4.0;
  EXPECT_LT(std::abs(snr(ess_trellis(), l, f) - snr(bess_trellis(), l, f)), 0.05);
}

TEST(RunLink, StepHalvingConverges) {
  LinkParams l;
  l.burst_symbols = 4096;
  for (double p : {l.launch_power_dbm, 7.0}) {
    l.launch_power_dbm = p;
    l.step_km = 0.1;
    const double coarse = snr(ess_trellis(), l, FiberParams{});
    l.step_km = 0.05;
    const double fine = snr(ess_trellis(), l, FiberParams{});
    EXPECT_LT(std::abs(coarse - fine), 0.05) << p << " dBm";
  }
}

TEST(RunLink, SweepIsUnimodal) {
  const auto powers = parse_power_sweep("-2:1:8");
  std::vector<double> mean(powers.size(), 0.0);
  LinkParams l = fast_link();
  for (std::uint64_t seed : {1, 2, 3}) {
    l.seed = seed;
    for (std::size_t i = 0; i < powers.size(); ++i) {
      l.launch_power_dbm = powers[i];
      mean[i] += snr(ess_trellis(), l, FiberParams{}) / 3.0;
    }
  }
  const auto peak = static_cast<std::size_t>(std::max_element(mean.begin(), mean.end()) - mean.begin());
  EXPECT_GT(peak, 0u);
  EXPECT_LT(peak + 1, powers.size());
  for (std::size_t i = 1; i <= peak; ++i) EXPECT_GT(mean[i], mean[i - 1]) << powers[i] << " dBm";
  for (std::size_t i = peak + 1; i < powers.size(); ++i) EXPECT_LT(mean[i], mean[i - 1]) << powers[i] << " dBm";
}

TEST(RunLink, BandAheadAtHighPower) {
  LinkParams l = fast_link();
  for (double p : {7.0, 8.0, 9.0, 10.0}) {
    l.launch_power_dbm = p;
    EXPECT_GT(snr(bess_trellis(), l, FiberParams{}), snr(ess_trellis(), l, FiberParams{})) << p << " dBm";
  }
}

}  // namespace
}  // namespace ess

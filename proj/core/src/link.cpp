#include "ess/link.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ess/codec.hpp"
#include "ess/errors.hpp"
#include "ess/pas_mapper.hpp"

namespace ess {

namespace {

// Independent streams from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

enum Stream : std::uint64_t { kSigns = 1, kAse = 2 };

}  // namespace

LinkResult run_link(std::span<const int> i_amplitudes, std::span<const int> q_amplitudes,
                    const LinkParams& link, const FiberParams& fiber) {
  link.validate();
  fiber.validate(true);
  const std::size_t burst = link.burst_symbols;
  if (i_amplitudes.size() < burst || q_amplitudes.size() < burst) {
    throw LengthError("need " + std::to_string(burst) + " amplitudes per rail, got " +
                      std::to_string(std::min(i_amplitudes.size(), q_amplitudes.size())));
  }

  const auto signs = random_sign_bits(2 * burst, derive_seed(link.seed, kSigns));
  const auto sign_span = std::span<const std::uint8_t>(signs);
  const auto ask_i = map_ask(i_amplitudes.first(burst), sign_span.first(burst));
  const auto ask_q = map_ask(q_amplitudes.first(burst), sign_span.subspan(burst, burst));
  const SymbolStream tx = normalize(map_qam(ask_i, ask_q));

  const auto taps = rrc_taps(link.rrc_rolloff, link.rrc_span_symbols, link.sps);
  Waveform wave = modulate(tx.symbols, link.sps, taps, link.symbol_rate_hz(), Boundary::circular);
  wave = ssfm_span(wave, fiber, link.step_km, dbm_to_watt(link.launch_power_dbm));
  wave = edfa(wave, fiber.span_loss_db(), link.edfa_nf_db, derive_seed(link.seed, kAse),
              fiber.carrier_hz());
  wave = cd_compensate(wave, fiber);
  const auto rx = demodulate(wave, taps, link.sps, taps.size() - 1, Boundary::circular);

  const std::size_t half_guard = link.guard_symbols / 2;
  const std::size_t used = burst - link.guard_symbols;
  const auto tx_span = std::span<const Complex>(tx.symbols).subspan(half_guard, used);
  const auto rx_span = std::span<const Complex>(rx).subspan(half_guard, used);
  return {effective_snr(tx_span, rx_span), link.launch_power_dbm};
}

std::vector<int> draw_shaped_amplitudes(const Trellis& trellis, std::size_t count,
                                        std::uint64_t seed) {
  const int k = max_shaping_bits(trellis);
  std::mt19937_64 rng(seed);
  std::vector<int> out;
  out.reserve(count + static_cast<std::size_t>(trellis.length()));
  BigUInt index;
  while (out.size() < count) {
    index = 0;
    int remaining = k;
    while (remaining > 0) {
      const int take = std::min(remaining, 64);
      std::uint64_t word = rng();
      if (take < 64) word >>= (64 - take);
      index <<= take;
      index |= word;
      remaining -= take;
    }
    const auto seq = encode_index(trellis, index);
    out.insert(out.end(), seq.begin(), seq.end());
  }
  out.resize(count);
  return out;
}

std::vector<int> draw_uniform_amplitudes(const Alphabet& alphabet, std::size_t count,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> out(count);
  const auto size = alphabet.size();
  for (auto& a : out) a = alphabet[static_cast<std::size_t>(rng() % size)];
  return out;
}

std::vector<double> parse_power_sweep(const std::string& spec) {
  const auto parse = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != text.size() || !std::isfinite(v)) {
      throw ParameterError("bad power sweep '" + spec + "'");
    }
    return v;
  };
  const auto first = spec.find(':');
  if (first == std::string::npos) return {parse(spec)};
  const auto second = spec.find(':', first + 1);
  if (second == std::string::npos || spec.find(':', second + 1) != std::string::npos) {
    throw ParameterError("power sweep must be start:step:stop, got '" + spec + "'");
  }
  const double start = parse(spec.substr(0, first));
  const double step = parse(spec.substr(first + 1, second - first - 1));
  const double stop = parse(spec.substr(second + 1));
  if (!(step > 0.0) || stop < start) {
    throw ParameterError("power sweep needs step > 0 and stop >= start");
  }
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
  return out;
}

}  // namespace ess

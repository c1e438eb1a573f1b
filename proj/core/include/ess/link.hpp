#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ess/fibersim.hpp"
#include "ess/trellis.hpp"

namespace ess {

struct LinkResult {
  double effective_snr_db = 0.0;
  double launch_power_dbm = 0.0;
};

/// Transmits one burst of 64-QAM-style symbols over a single span:
///   signs + amplitudes -> QAM -> normalize -> RRC (circular) -> launch power
///   -> SSFM -> EDFA (gain = span loss) -> CD compensation -> matched filter
///   -> effective SNR on the burst minus its guard ring.
/// `i_amplitudes` and `q_amplitudes` must each hold at least burst_symbols
/// values. Sign bits and ASE noise derive from link.seed only, so two inputs
/// sharing a seed see the same signs and the same noise realisation.
LinkResult run_link(std::span<const int> i_amplitudes, std::span<const int> q_amplitudes,
                    const LinkParams& link, const FiberParams& fiber);

/// Concatenated codebook sequences for uniformly random k-bit blocks,
/// k = max_shaping_bits(trellis), truncated to `count` amplitudes.
std::vector<int> draw_shaped_amplitudes(const Trellis& trellis, std::size_t count,
                                        std::uint64_t seed);

/// Independent uniform amplitudes over the alphabet (unshaped reference).
std::vector<int> draw_uniform_amplitudes(const Alphabet& alphabet, std::size_t count,
                                         std::uint64_t seed);

/// Parses "start:step:stop" (inclusive) or a single value.
std::vector<double> parse_power_sweep(const std::string& spec);

}  // namespace ess

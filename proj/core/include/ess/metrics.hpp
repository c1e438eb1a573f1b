#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ess/trellis.hpp"

namespace ess {

/// Per-symbol statistics of an ensemble of amplitude sequences.
struct ShapingMetrics {
  std::vector<double> p_amp;  // indexed like the alphabet
  double e2 = 0.0;            // E[A^2]
  double e4 = 0.0;            // E[A^4]
  double var_e = 0.0;         // var[A^2] = E[A^4] - E[A^2]^2
  double kurtosis = 0.0;      // E[A^4] / E[A^2]^2
};

/// Statistics over all T(0,0) sequences of the trellis, each weighted
/// equally and averaged over positions. Accumulated exactly as rationals:
///
///   P(a) = sum_{n,e} F(n,e) T(n+1, e+a^2) / (N T(0,0))
ShapingMetrics exact_metrics(const Trellis& trellis);

enum class SamplingMode { random, exhaustive };

struct SampledMetrics {
  ShapingMetrics metrics;
  double e2_stderr = 0.0;
  double e4_stderr = 0.0;
  std::uint64_t num_samples = 0;
  std::uint64_t seed = 0;
  bool exhaustive = false;
};

/// Statistics over the used codebook, indices [0, 2^k). Random mode draws
/// uniform indices from a seeded generator split into fixed-size chunks with
/// their own derived seeds, so the result does not depend on thread count.
/// Exhaustive mode walks every used index (2^k <= 2^24).
SampledMetrics sampled_metrics(const Trellis& trellis, int k, std::uint64_t num_samples,
                               std::uint64_t seed, SamplingMode mode = SamplingMode::random);

/// Metrics of an explicit list of sequences (uniform weights).
ShapingMetrics metrics_of(std::span<const std::vector<int>> sequences, std::span<const int> alphabet);

struct SequenceEnergyStats {
  double mean_e = 0.0;          // mean of a_i^2
  double var_e = 0.0;           // population variance of a_i^2
  std::vector<Energy> profile;  // profile[i] = energy of the first i amplitudes
};

SequenceEnergyStats sequence_energy_stats(std::span<const int> seq);

struct WindowedEnergy {
  std::vector<Energy> sums;  // stride-1 sliding window energies
  double deviation = 0.0;    // population standard deviation of `sums`
};

WindowedEnergy windowed_energy_deviation(std::span<const int> seq, std::size_t window_len);

/// 10 log10(x / y). Throws DomainError on nonpositive input.
double compare_db(double x, double y);

}  // namespace ess

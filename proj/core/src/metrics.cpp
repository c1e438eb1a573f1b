#include "ess/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "ess/codec.hpp"
#include "ess/errors.hpp"

namespace ess {

namespace {

// num/den rounded to double. The quotient is formed with at least 80
// significant bits before conversion.
double ratio_to_double(const BigUInt& num, const BigUInt& den) {
  if (num == 0) return 0.0;
  const int shift = 80 - (floor_log2(num) - floor_log2(den));
  BigUInt q = shift >= 0 ? BigUInt((num << shift) / den) : BigUInt(num / (den << -shift));
  return std::ldexp(q.convert_to<double>(), -shift);
}

ShapingMetrics from_weights(std::span<const BigUInt> weights, std::span<const int> alphabet) {
  BigUInt total = 0, s2 = 0, s4 = 0;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    const BigUInt a2 = BigUInt(alphabet[i]) * alphabet[i];
    total += weights[i];
    s2 += weights[i] * a2;
    s4 += weights[i] * a2 * a2;
  }
  ShapingMetrics m;
  for (const auto& w : weights) m.p_amp.push_back(ratio_to_double(w, total));
  m.e2 = ratio_to_double(s2, total);
  m.e4 = ratio_to_double(s4, total);
  // var = (s4 total - s2^2) / total^2, kurtosis = s4 total / s2^2
  m.var_e = ratio_to_double(s4 * total - s2 * s2, total * total);
  m.kurtosis = ratio_to_double(s4 * total, s2 * s2);
  return m;
}

ShapingMetrics from_counts(std::span<const std::uint64_t> counts, std::span<const int> alphabet) {
  std::vector<BigUInt> weights(counts.begin(), counts.end());
  return from_weights(weights, alphabet);
}

}  // namespace

ShapingMetrics exact_metrics(const Trellis& trellis) {
  const auto alphabet = trellis.alphabet().values();
  std::vector<BigUInt> weights(alphabet.size(), BigUInt(0));
  for (int n = 0; n < trellis.length(); ++n) {
    const auto& col = trellis.column(n);
    for (std::size_t i = 0; i < col.energies.size(); ++i) {
      for (std::size_t j = 0; j < alphabet.size(); ++j) {
        const BigUInt& child =
            trellis.back_count(n + 1, col.energies[i] + static_cast<Energy>(alphabet[j]) * alphabet[j]);
        if (child != 0) weights[j] += col.fwd[i] * child;
      }
    }
  }
  return from_weights(weights, alphabet);
}

ShapingMetrics metrics_of(std::span<const std::vector<int>> sequences,
                          std::span<const int> alphabet) {
  std::vector<std::uint64_t> counts(alphabet.size(), 0);
  for (const auto& seq : sequences) {
    for (int a : seq) {
      const auto it = std::lower_bound(alphabet.begin(), alphabet.end(), a);
      if (it == alphabet.end() || *it != a) {
        throw InvalidSequenceError("amplitude " + std::to_string(a) + " not in alphabet");
      }
      ++counts[static_cast<std::size_t>(it - alphabet.begin())];
    }
  }
  return from_counts(counts, alphabet);
}

namespace {

struct ChunkResult {
  std::vector<std::uint64_t> counts;
  double sum_x = 0, sum_xx = 0;  // per-sequence mean of a^2
  double sum_y = 0, sum_yy = 0;  // per-sequence mean of a^4
};

void accumulate(const AmplitudeSequence& seq, std::span<const int> alphabet, ChunkResult& r) {
  double x = 0, y = 0;
  for (int a : seq) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(alphabet.begin(), alphabet.end(), a) - alphabet.begin());
    ++r.counts[idx];
    const double a2 = static_cast<double>(a) * a;
    x += a2;
    y += a2 * a2;
  }
  x /= static_cast<double>(seq.size());
  y /= static_cast<double>(seq.size());
  r.sum_x += x;
  r.sum_xx += x * x;
  r.sum_y += y;
  r.sum_yy += y * y;
}

BigUInt random_index(std::mt19937_64& rng, int k) {
  BigUInt value = 0;
  int remaining = k;
  while (remaining > 0) {
    const int take = std::min(remaining, 64);
    std::uint64_t word = rng();
    if (take < 64) word >>= (64 - take);
    value <<= take;
    value |= word;
    remaining -= take;
  }
  return value;
}

constexpr std::uint64_t kChunkSize = 4096;

}  // namespace

SampledMetrics sampled_metrics(const Trellis& trellis, int k, std::uint64_t num_samples,
                               std::uint64_t seed, SamplingMode mode) {
  if (k < 0 || k > max_shaping_bits(trellis)) {
    throw ParameterError("k must lie in [0, max_shaping_bits]");
  }
  const auto alphabet = trellis.alphabet().values();
  const bool exhaustive = mode == SamplingMode::exhaustive;
  if (exhaustive) {
    if (k > 24) throw ParameterError("exhaustive sampling limited to k <= 24");
    num_samples = std::uint64_t{1} << k;
  }
  if (num_samples == 0) throw ParameterError("num_samples must be >= 1");

  const std::uint64_t num_chunks = (num_samples + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkResult> results(num_chunks);
  const auto run_chunk = [&](std::uint64_t c) {
    ChunkResult& r = results[c];
    r.counts.assign(alphabet.size(), 0);
    const std::uint64_t begin = c * kChunkSize;
    const std::uint64_t end = std::min(num_samples, begin + kChunkSize);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 rng(seq);
    for (std::uint64_t s = begin; s < end; ++s) {
      const BigUInt index = exhaustive ? BigUInt(s) : random_index(rng, k);
      accumulate(encode_index(trellis, index), alphabet, r);
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, std::thread::hardware_concurrency()), num_chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < num_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < num_chunks; c += workers) run_chunk(c);
      });
    }
  }

  std::vector<std::uint64_t> counts(alphabet.size(), 0);
  double sum_x = 0, sum_xx = 0, sum_y = 0, sum_yy = 0;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += r.counts[i];
    sum_x += r.sum_x;
    sum_xx += r.sum_xx;
    sum_y += r.sum_y;
    sum_yy += r.sum_yy;
  }
  SampledMetrics out;
  out.metrics = from_counts(counts, alphabet);
  out.num_samples = num_samples;
  out.seed = seed;
  out.exhaustive = exhaustive;
  if (!exhaustive && num_samples > 1) {
    const double m = static_cast<double>(num_samples);
    const auto stderr_of = [m](double s, double ss) {
      const double var = std::max(0.0, (ss - s * s / m) / (m - 1.0));
      return std::sqrt(var / m);
    };
    out.e2_stderr = stderr_of(sum_x, sum_xx);
    out.e4_stderr = stderr_of(sum_y, sum_yy);
  }
  return out;
}

SequenceEnergyStats sequence_energy_stats(std::span<const int> seq) {
  if (seq.empty()) throw DomainError("energy statistics need a nonempty sequence");
  SequenceEnergyStats s;
  s.profile.reserve(seq.size() + 1);
  s.profile.push_back(0);
  for (int a : seq) s.profile.push_back(s.profile.back() + static_cast<Energy>(a) * a);
  const double n = static_cast<double>(seq.size());
  s.mean_e = static_cast<double>(s.profile.back()) / n;
  double acc = 0.0;
  for (int a : seq) {
    const double d = static_cast<double>(a) * a - s.mean_e;
    acc += d * d;
  }
  s.var_e = acc / n;
  return s;
}

WindowedEnergy windowed_energy_deviation(std::span<const int> seq, std::size_t window_len) {
  if (window_len < 1 || window_len > seq.size()) {
    throw DomainError("window length must lie in [1, N]");
  }
  WindowedEnergy w;
  Energy running = sequence_energy(seq.first(window_len));
  w.sums.push_back(running);
  for (std::size_t i = window_len; i < seq.size(); ++i) {
    running += static_cast<Energy>(seq[i]) * seq[i] -
               static_cast<Energy>(seq[i - window_len]) * seq[i - window_len];
    w.sums.push_back(running);
  }
  double mean = 0.0;
  for (Energy s : w.sums) mean += static_cast<double>(s);
  mean /= static_cast<double>(w.sums.size());
  double acc = 0.0;
  for (Energy s : w.sums) acc += (static_cast<double>(s) - mean) * (static_cast<double>(s) - mean);
  w.deviation = std::sqrt(acc / static_cast<double>(w.sums.size()));
  return w;
}

double compare_db(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("dB comparison needs positive inputs");
  return 10.0 * std::log10(x / y);
}

}  // namespace ess

#include "ess/band_search.hpp"

#include <cmath>

#include "ess/errors.hpp"

namespace ess {

std::optional<int> min_band_height(const TrellisParams& params, int width, int k) {
  const auto enough = [&](int h) {
    return floor_log2(count_sequences(params, BandParams{h, width})) >= k;
  };
  int lo = 1;
  int hi = static_cast<int>(params.final_levels());
  if (!enough(hi)) return std::nullopt;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (enough(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

BandSearchResult search_band(int n_amplitudes, const Alphabet& alphabet,
                             const BandSearchTarget& target) {
  if (target.energy_tol_db <= 0.0) throw ParameterError("energy tolerance must be positive");
  BandSearchResult result;
  const Energy sphere_emax = min_emax_for_bits(n_amplitudes, alphabet, target.k);
  result.sphere_params = TrellisParams::make(n_amplitudes, alphabet, sphere_emax);
  result.sphere_metrics = exact_metrics(build_full_trellis(result.sphere_params));
  const auto& ref = result.sphere_metrics;

  std::optional<BandCandidate> in_window;
  std::optional<BandCandidate> nearest;
  const auto var_miss = [&](const BandCandidate& c) { return std::abs(c.var_db - target.var_db); };
  const auto energy_miss = [&](const BandCandidate& c) {
    return std::abs(c.energy_db - target.energy_db);
  };

  for (int step = 0; step <= target.max_extra_levels; ++step) {
    const auto params =
        TrellisParams::make(n_amplitudes, alphabet, sphere_emax + step * kEnergyStep);
    double lowest_energy_db = INFINITY;
    for (int w = 0; w <= n_amplitudes; ++w) {
      const auto h = min_band_height(params, w, target.k);
      if (!h) continue;
      ++result.evaluated;
      BandCandidate c{params, BandParams{*h, w}, exact_metrics(build_band_trellis(params, {*h, w})),
                      0.0, 0.0};
      c.energy_db = compare_db(c.metrics.e2, ref.e2);
      c.var_db = compare_db(c.metrics.var_e, ref.var_e);
      lowest_energy_db = std::min(lowest_energy_db, c.energy_db);
      if (!(c.metrics.kurtosis < ref.kurtosis)) continue;
      if (energy_miss(c) <= target.energy_tol_db) {
        if (!in_window || var_miss(c) < var_miss(*in_window) ||
            (var_miss(c) == var_miss(*in_window) && energy_miss(c) < energy_miss(*in_window))) {
          in_window = c;
        }
      }
      if (!nearest || energy_miss(c) < energy_miss(*nearest)) nearest = c;
    }
    // Energy grows with E_max for every w; nothing further can land in range.
    if (lowest_energy_db > target.energy_db + target.energy_tol_db) break;
  }
  result.best = in_window ? in_window : nearest;
  return result;
}

}  // namespace ess

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ess/metrics.hpp"
#include "ess/trellis.hpp"

namespace ess {

/// What the band search aims for, relative to the full-sphere trellis at the
/// same N, alphabet and rate.
struct BandSearchTarget {
  int k = 0;
  double energy_db = 0.44;       // E[A^2] increase over the sphere
  double energy_tol_db = 0.15;
  double var_db = -0.67;         // var[A^2] change over the sphere
  int max_extra_levels = 64;     // E_max grid steps explored above the sphere's E_max
};

struct BandCandidate {
  TrellisParams params;
  BandParams band;
  ShapingMetrics metrics;
  double energy_db = 0.0;
  double var_db = 0.0;
};

struct BandSearchResult {
  TrellisParams sphere_params;
  ShapingMetrics sphere_metrics;
  std::optional<BandCandidate> best;
  std::size_t evaluated = 0;  // (E_max, w) pairs whose minimal h was found
};

/// Searches (E_max, h, w) for a band trellis carrying at least 2^k sequences.
/// For each E_max and w the minimal feasible h is located by bisection. A
/// candidate must have lower kurtosis than the sphere; among those inside the
/// energy tolerance the one nearest the var target wins, otherwise the one
/// nearest the energy target.
BandSearchResult search_band(int n_amplitudes, const Alphabet& alphabet,
                             const BandSearchTarget& target);

/// Smallest band height giving at least 2^k sequences, if any.
std::optional<int> min_band_height(const TrellisParams& params, int width, int k);

}  // namespace ess

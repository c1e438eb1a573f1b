#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ess {

// Path counts in the enumerative codebook. N=108 trellises carry counts well
// beyond 2^162, so no fixed-width type is used anywhere on the codebook path.
using BigUInt = boost::multiprecision::cpp_int;

using Energy = std::int64_t;

// Energy grid spacing: every odd square is 1 (mod 8).
inline constexpr Energy kEnergyStep = 8;

/// Ascending set of distinct positive odd amplitude levels.
class Alphabet {
 public:
  explicit Alphabet(std::vector<int> amplitudes);

  /// Parses a comma-separated list such as "1,3,5,7".
  static Alphabet parse(std::string_view text);

  std::span<const int> values() const { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }
  int max() const { return amplitudes_.back(); }
  int operator[](std::size_t i) const { return amplitudes_[i]; }
  bool contains(int amplitude) const;

  std::string to_string() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<int> amplitudes_;
};

struct TrellisParams {
  int n_amplitudes = 0;
  Alphabet alphabet{std::vector<int>{1}};
  Energy e_max = 0;

  /// Validates and builds parameters. An e_max that is off the energy grid is
  /// rounded down to the nearest grid value; `rounded` reports whether that
  /// happened.
  static TrellisParams make(int n_amplitudes, Alphabet alphabet, Energy e_max,
                            bool* rounded = nullptr);

  /// Number of energy levels in the final column, (e_max - N)/8 + 1.
  Energy final_levels() const { return (e_max - n_amplitudes) / kEnergyStep + 1; }

  friend bool operator==(const TrellisParams&, const TrellisParams&) = default;
};

struct BandParams {
  int height = 1;  // active energy levels per column
  int width = 0;   // final columns whose band top follows the full-trellis top

  friend bool operator==(const BandParams&, const BandParams&) = default;
};

/// Column-indexed set of active energy levels with exact backward counts
/// T(n,e) (paths from the node to the final column) and forward counts F(n,e)
/// (paths from the root to the node). Only active nodes are stored. Immutable
/// once built.
class Trellis {
 public:
  struct Column {
    std::vector<Energy> energies;  // ascending
    std::vector<BigUInt> back;
    std::vector<BigUInt> fwd;
  };

  Trellis(TrellisParams params, std::optional<BandParams> band,
          std::vector<Column> columns);

  const TrellisParams& params() const { return params_; }
  const std::optional<BandParams>& band() const { return band_; }
  const Alphabet& alphabet() const { return params_.alphabet; }
  int length() const { return params_.n_amplitudes; }

  std::span<const Energy> levels(int column) const {
    return columns_.at(static_cast<std::size_t>(column)).energies;
  }
  const Column& column(int n) const { return columns_.at(static_cast<std::size_t>(n)); }

  /// Position of `energy` in column `n`, if the node is active.
  std::optional<std::size_t> find(int n, Energy energy) const;
  bool contains(int n, Energy energy) const { return find(n, energy).has_value(); }

  /// Zero for inactive nodes.
  const BigUInt& back_count(int n, Energy energy) const;
  const BigUInt& fwd_count(int n, Energy energy) const;

  const BigUInt& num_sequences() const { return columns_.front().back.front(); }
  std::size_t num_nodes() const;

 private:
  TrellisParams params_;
  std::optional<BandParams> band_;
  std::vector<Column> columns_;
};

/// Upper and lower edge of the band at column n (inclusive), before pruning.
struct BandEdges {
  Energy lower;
  Energy upper;
};

/// Largest energy a node in column n may carry in the full trellis:
/// min(n * a_max^2, e_max - (N - n)).
Energy trellis_top(const TrellisParams& params, int n);

/// Band membership rule. U(n) follows the full-trellis top on the last
/// `width` columns and a straight ramp of slope e_max/N elsewhere; the band
/// is `height` grid levels tall below U(n).
BandEdges band_edges(const TrellisParams& params, const BandParams& band, int n);

Trellis build_full_trellis(const TrellisParams& params);

/// Throws EmptyCodebookError when the band admits no complete path.
Trellis build_band_trellis(const TrellisParams& params, const BandParams& band);

/// T(0,0) only, without materialising forward counts. Returns zero for an
/// empty band instead of throwing.
BigUInt count_sequences(const TrellisParams& params,
                        const std::optional<BandParams>& band = std::nullopt);

inline const BigUInt& num_sequences(const Trellis& trellis) {
  return trellis.num_sequences();
}

/// floor(log2 T(0,0)).
int max_shaping_bits(const Trellis& trellis);
int floor_log2(const BigUInt& value);

/// Smallest grid-valid e_max whose full trellis carries at least 2^k
/// sequences. Throws InfeasibleRateError if even the full cube falls short.
Energy min_emax_for_bits(int n_amplitudes, const Alphabet& alphabet, int k);

}  // namespace ess

#include "ess/trellis.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ess/errors.hpp"

namespace ess {

Alphabet::Alphabet(std::vector<int> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty()) throw ParameterError("alphabet is empty");
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    const int a = amplitudes_[i];
    if (a <= 0 || a % 2 == 0) {
      throw ParameterError("alphabet entries must be positive odd integers, got " +
                           std::to_string(a));
    }
    if (i > 0 && a <= amplitudes_[i - 1]) {
      throw ParameterError("alphabet must be strictly ascending");
    }
    if ((static_cast<Energy>(a) * a) % kEnergyStep != 1) {
      throw ParameterError("alphabet squares must be 1 mod 8");
    }
  }
}

Alphabet Alphabet::parse(std::string_view text) {
  std::vector<int> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    int value = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
      throw ParameterError("cannot parse alphabet '" + std::string(text) + "'");
    }
    values.push_back(value);
    pos = comma + 1;
  }
  return Alphabet(std::move(values));
}

bool Alphabet::contains(int amplitude) const {
  return std::binary_search(amplitudes_.begin(), amplitudes_.end(), amplitude);
}

std::string Alphabet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(amplitudes_[i]);
  }
  return out;
}

TrellisParams TrellisParams::make(int n_amplitudes, Alphabet alphabet, Energy e_max,
                                  bool* rounded) {
  if (n_amplitudes < 1) throw ParameterError("N must be positive");
  if (e_max < n_amplitudes) {
    throw ParameterError("E_max=" + std::to_string(e_max) + " is below N=" +
                         std::to_string(n_amplitudes) +
                         "; the all-ones sequence does not fit");
  }
  const Energy excess = (e_max - n_amplitudes) % kEnergyStep;
  if (rounded) *rounded = excess != 0;
  TrellisParams p;
  p.n_amplitudes = n_amplitudes;
  p.alphabet = std::move(alphabet);
  p.e_max = e_max - excess;
  return p;
}

Trellis::Trellis(TrellisParams params, std::optional<BandParams> band,
                 std::vector<Column> columns)
    : params_(std::move(params)), band_(band), columns_(std::move(columns)) {
  if (columns_.size() != static_cast<std::size_t>(params_.n_amplitudes) + 1 ||
      columns_.front().energies.size() != 1) {
    throw ParameterError("trellis must have N+1 columns and a single root");
  }
}

std::optional<std::size_t> Trellis::find(int n, Energy energy) const {
  if (n < 0 || n > params_.n_amplitudes) return std::nullopt;
  const auto& e = columns_[static_cast<std::size_t>(n)].energies;
  const auto it = std::lower_bound(e.begin(), e.end(), energy);
  if (it == e.end() || *it != energy) return std::nullopt;
  return static_cast<std::size_t>(it - e.begin());
}

namespace {
const BigUInt kZero{0};
}

const BigUInt& Trellis::back_count(int n, Energy energy) const {
  const auto i = find(n, energy);
  return i ? columns_[static_cast<std::size_t>(n)].back[*i] : kZero;
}

const BigUInt& Trellis::fwd_count(int n, Energy energy) const {
  const auto i = find(n, energy);
  return i ? columns_[static_cast<std::size_t>(n)].fwd[*i] : kZero;
}

std::size_t Trellis::num_nodes() const {
  std::size_t total = 0;
  for (const auto& c : columns_) total += c.energies.size();
  return total;
}

Energy trellis_top(const TrellisParams& params, int n) {
  const Energy amax2 = static_cast<Energy>(params.alphabet.max()) * params.alphabet.max();
  return std::min<Energy>(n * amax2, params.e_max - (params.n_amplitudes - n));
}

namespace {

// Largest value <= x on the grid of column n, i.e. congruent to n mod 8.
Energy grid_floor(Energy x, int n) {
  const Energy offset = x - n;
  const Energy steps = offset >= 0 ? offset / kEnergyStep : -((-offset + kEnergyStep - 1) / kEnergyStep);
  return n + steps * kEnergyStep;
}

}  // namespace

BandEdges band_edges(const TrellisParams& params, const BandParams& band, int n) {
  const int N = params.n_amplitudes;
  const Energy top = trellis_top(params, n);
  Energy upper = top;
  if (n > 0 && n < N - band.width) {
    const Energy ramp = std::max<Energy>(n, (static_cast<Energy>(n) * params.e_max) / N);
    upper = std::min(top, grid_floor(ramp, n));
  }
  const Energy lower = std::max<Energy>(n, upper - kEnergyStep * (band.height - 1));
  return {lower, upper};
}

namespace {

void validate_band(const TrellisParams& params, const BandParams& band) {
  if (band.height < 1) throw ParameterError("band height must be >= 1");
  if (band.width < 0 || band.width > params.n_amplitudes) {
    throw ParameterError("band width must lie in [0, N]");
  }
}

struct Layers {
  std::vector<std::vector<Energy>> energies;
  std::vector<std::vector<BigUInt>> back;
};

// Forward reachability inside the admissible window of every column followed
// by the backward count recursion. Dead nodes are kept (with count zero).
Layers reach_and_count(const TrellisParams& params, const std::optional<BandParams>& band) {
  const int N = params.n_amplitudes;
  std::vector<Energy> squares;
  for (int a : params.alphabet.values()) squares.push_back(static_cast<Energy>(a) * a);

  Layers out;
  out.energies.resize(static_cast<std::size_t>(N) + 1);
  out.energies[0] = {0};
  std::vector<char> mark;
  for (int n = 1; n <= N; ++n) {
    Energy lo = n;
    Energy hi = trellis_top(params, n);
    if (band) {
      const BandEdges edges = band_edges(params, *band, n);
      lo = std::max(lo, edges.lower);
      hi = std::min(hi, edges.upper);
    }
    auto& col = out.energies[static_cast<std::size_t>(n)];
    if (hi < lo) break;
    mark.assign(static_cast<std::size_t>((hi - lo) / kEnergyStep) + 1, 0);
    for (Energy e : out.energies[static_cast<std::size_t>(n) - 1]) {
      for (Energy s : squares) {
        const Energy next = e + s;
        if (next > hi) break;
        if (next >= lo) mark[static_cast<std::size_t>((next - lo) / kEnergyStep)] = 1;
      }
    }
    for (std::size_t i = 0; i < mark.size(); ++i) {
      if (mark[i]) col.push_back(lo + static_cast<Energy>(i) * kEnergyStep);
    }
    if (col.empty()) break;
  }

  out.back.resize(static_cast<std::size_t>(N) + 1);
  out.back[static_cast<std::size_t>(N)].assign(out.energies[static_cast<std::size_t>(N)].size(),
                                               BigUInt(1));
  for (int n = N - 1; n >= 0; --n) {
    const auto& here = out.energies[static_cast<std::size_t>(n)];
    const auto& next = out.energies[static_cast<std::size_t>(n) + 1];
    const auto& next_back = out.back[static_cast<std::size_t>(n) + 1];
    auto& back = out.back[static_cast<std::size_t>(n)];
    back.assign(here.size(), BigUInt(0));
    if (next.empty()) continue;
    for (std::size_t i = 0; i < here.size(); ++i) {
      auto it = next.begin();
      for (Energy s : squares) {
        const Energy target = here[i] + s;
        it = std::lower_bound(it, next.end(), target);
        if (it == next.end()) break;
        if (*it == target) back[i] += next_back[static_cast<std::size_t>(it - next.begin())];
      }
    }
  }
  return out;
}

Trellis build(const TrellisParams& params, const std::optional<BandParams>& band) {
  Layers layers = reach_and_count(params, band);
  const int N = params.n_amplitudes;
  if (layers.back[0][0] == 0) {
    throw EmptyCodebookError("band admits no complete path; widen h or w");
  }

  std::vector<Trellis::Column> columns(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    auto& dst = columns[static_cast<std::size_t>(n)];
    auto& energies = layers.energies[static_cast<std::size_t>(n)];
    auto& back = layers.back[static_cast<std::size_t>(n)];
    for (std::size_t i = 0; i < energies.size(); ++i) {
      if (back[i] != 0) {
        dst.energies.push_back(energies[i]);
        dst.back.push_back(std::move(back[i]));
      }
    }
    dst.fwd.assign(dst.energies.size(), BigUInt(0));
  }

  // Every remaining node has a live child, hence a live path from the root.
  columns[0].fwd[0] = 1;
  for (int n = 0; n < N; ++n) {
    const auto& here = columns[static_cast<std::size_t>(n)];
    auto& next = columns[static_cast<std::size_t>(n) + 1];
    for (std::size_t i = 0; i < here.energies.size(); ++i) {
      for (int a : params.alphabet.values()) {
        const Energy target = here.energies[i] + static_cast<Energy>(a) * a;
        const auto it = std::lower_bound(next.energies.begin(), next.energies.end(), target);
        if (it != next.energies.end() && *it == target) {
          next.fwd[static_cast<std::size_t>(it - next.energies.begin())] += here.fwd[i];
        }
      }
    }
  }
  return Trellis(params, band, std::move(columns));
}

}  // namespace

Trellis build_full_trellis(const TrellisParams& params) { return build(params, std::nullopt); }

Trellis build_band_trellis(const TrellisParams& params, const BandParams& band) {
  validate_band(params, band);
  return build(params, band);
}

BigUInt count_sequences(const TrellisParams& params, const std::optional<BandParams>& band) {
  if (band) validate_band(params, *band);
  return reach_and_count(params, band).back[0][0];
}

int floor_log2(const BigUInt& value) {
  if (value <= 0) return -1;
  return static_cast<int>(boost::multiprecision::msb(value));
}

int max_shaping_bits(const Trellis& trellis) { return floor_log2(trellis.num_sequences()); }

Energy min_emax_for_bits(int n_amplitudes, const Alphabet& alphabet, int k) {
  if (k < 0) throw ParameterError("k must be nonnegative");
  if (n_amplitudes < 1) throw ParameterError("N must be positive");
  const Energy amax2 = static_cast<Energy>(alphabet.max()) * alphabet.max();
  Energy lo_step = 0;
  Energy hi_step = static_cast<Energy>(n_amplitudes) * (amax2 - 1) / kEnergyStep;
  const auto bits_at = [&](Energy step) {
    const auto params =
        TrellisParams::make(n_amplitudes, alphabet, n_amplitudes + step * kEnergyStep);
    return floor_log2(count_sequences(params));
  };
  if (bits_at(hi_step) < k) {
    std::ostringstream msg;
    msg << "k=" << k << " exceeds the capacity of N=" << n_amplitudes << " over alphabet {"
        << alphabet.to_string() << "}";
    throw InfeasibleRateError(msg.str());
  }
  while (lo_step < hi_step) {
    const Energy mid = lo_step + (hi_step - lo_step) / 2;
    if (bits_at(mid) >= k) {
      hi_step = mid;
    } else {
      lo_step = mid + 1;
    }
  }
  return n_amplitudes + lo_step * kEnergyStep;
}

}  // namespace ess

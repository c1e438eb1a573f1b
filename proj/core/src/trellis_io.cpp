#include "ess/trellis_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ess/errors.hpp"

namespace ess {

namespace {

constexpr std::string_view kMagic = "ESSTRELLIS v1";

template <class Int>
Int parse_int(std::string_view text, std::string_view what) {
  Int value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw FormatError("malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

BigUInt parse_count(const std::string& text) {
  if (text.empty() || text.size() > 4096 ||
      text.find_first_not_of("0123456789") != std::string::npos) {
    throw FormatError("malformed count '" + text + "'");
  }
  return BigUInt(text);
}

std::string_view field(std::string_view token, std::string_view key) {
  if (token.size() <= key.size() || token.substr(0, key.size()) != key ||
      token[key.size()] != '=') {
    throw FormatError("expected " + std::string(key) + "=..., got '" + std::string(token) + "'");
  }
  return token.substr(key.size() + 1);
}

}  // namespace

void serialize(const Trellis& trellis, std::ostream& out) {
  const auto& p = trellis.params();
  out << kMagic << '\n';
  out << "N=" << p.n_amplitudes << " ALPHABET=" << p.alphabet.to_string() << " EMAX=" << p.e_max
      << " BAND=";
  if (trellis.band()) {
    out << trellis.band()->height << ',' << trellis.band()->width;
  } else {
    out << "none";
  }
  out << '\n';
  for (int n = 0; n <= trellis.length(); ++n) {
    const auto& col = trellis.column(n);
    for (std::size_t i = 0; i < col.energies.size(); ++i) {
      out << n << ' ' << col.energies[i] << ' ' << col.back[i] << ' ' << col.fwd[i] << '\n';
    }
  }
  out << "END " << trellis.num_sequences() << '\n';
}

Trellis deserialize(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty trellis stream");
  if (line.rfind("ESSTRELLIS ", 0) != 0) throw FormatError("not a trellis file");
  if (line != kMagic) throw FormatError("unsupported trellis version '" + line.substr(11) + "'");

  if (!std::getline(in, line)) throw FormatError("truncated trellis header");
  std::istringstream header(line);
  std::string tok_n, tok_alpha, tok_emax, tok_band, extra;
  if (!(header >> tok_n >> tok_alpha >> tok_emax >> tok_band) || (header >> extra)) {
    throw FormatError("malformed trellis header '" + line + "'");
  }
  const int n_amp = parse_int<int>(field(tok_n, "N"), "N");
  TrellisParams params;
  std::optional<BandParams> band;
  try {
    Alphabet alphabet = Alphabet::parse(field(tok_alpha, "ALPHABET"));
    const auto e_max = parse_int<Energy>(field(tok_emax, "EMAX"), "EMAX");
    bool rounded = false;
    params = TrellisParams::make(n_amp, std::move(alphabet), e_max, &rounded);
    if (rounded) throw FormatError("EMAX is off the energy grid");
  } catch (const ParameterError& e) {
    throw FormatError(std::string("invalid trellis parameters: ") + e.what());
  }
  const std::string_view band_text = field(tok_band, "BAND");
  if (band_text != "none") {
    const auto comma = band_text.find(',');
    if (comma == std::string_view::npos) throw FormatError("malformed BAND field");
    band = BandParams{parse_int<int>(band_text.substr(0, comma), "band height"),
                      parse_int<int>(band_text.substr(comma + 1), "band width")};
    if (band->height < 1 || band->width < 0 || band->width > n_amp) {
      throw FormatError("BAND out of range");
    }
  }

  std::vector<Trellis::Column> columns(static_cast<std::size_t>(n_amp) + 1);
  bool ended = false;
  BigUInt checksum;
  int last_n = 0;
  while (std::getline(in, line)) {
    if (line.rfind("END ", 0) == 0) {
      checksum = parse_count(line.substr(4));
      ended = true;
      break;
    }
    std::istringstream row(line);
    std::string s_n, s_e, s_t, s_f;
    if (!(row >> s_n >> s_e >> s_t >> s_f) || (row >> extra)) {
      throw FormatError("malformed node line '" + line + "'");
    }
    const int n = parse_int<int>(s_n, "column");
    const auto e = parse_int<Energy>(s_e, "energy");
    if (n < last_n || n > n_amp) throw FormatError("node column out of order: " + line);
    last_n = n;
    auto& col = columns[static_cast<std::size_t>(n)];
    if (!col.energies.empty() && e <= col.energies.back()) {
      throw FormatError("node energies out of order: " + line);
    }
    if ((e - n) % kEnergyStep != 0 || e < n || e > trellis_top(params, n)) {
      throw FormatError("node off the energy grid: " + line);
    }
    col.energies.push_back(e);
    col.back.push_back(parse_count(s_t));
    col.fwd.push_back(parse_count(s_f));
  }
  if (!ended) throw FormatError("truncated trellis stream (missing END)");
  if (columns[0].energies.size() != 1 || columns[0].energies[0] != 0) {
    throw FormatError("trellis root (0,0) missing");
  }

  // Recompute both recursions from the stored node set and compare.
  const auto squares = [&] {
    std::vector<Energy> s;
    for (int a : params.alphabet.values()) s.push_back(static_cast<Energy>(a) * a);
    return s;
  }();
  for (int n = 0; n <= n_amp; ++n) {
    const auto& col = columns[static_cast<std::size_t>(n)];
    if (col.energies.empty()) throw FormatError("empty trellis column " + std::to_string(n));
    for (std::size_t i = 0; i < col.energies.size(); ++i) {
      BigUInt expect_back = 0;
      BigUInt expect_fwd = 0;
      if (n == n_amp) {
        expect_back = 1;
      } else {
        const auto& next = columns[static_cast<std::size_t>(n) + 1];
        for (Energy s : squares) {
          const auto it = std::lower_bound(next.energies.begin(), next.energies.end(),
                                           col.energies[i] + s);
          if (it != next.energies.end() && *it == col.energies[i] + s) {
            expect_back += next.back[static_cast<std::size_t>(it - next.energies.begin())];
          }
        }
      }
      if (n == 0) {
        expect_fwd = 1;
      } else {
        const auto& prev = columns[static_cast<std::size_t>(n) - 1];
        for (Energy s : squares) {
          const auto it = std::lower_bound(prev.energies.begin(), prev.energies.end(),
                                           col.energies[i] - s);
          if (it != prev.energies.end() && *it == col.energies[i] - s) {
            expect_fwd += prev.fwd[static_cast<std::size_t>(it - prev.energies.begin())];
          }
        }
      }
      if (expect_back != col.back[i] || expect_fwd != col.fwd[i] || expect_back == 0 ||
          expect_fwd == 0) {
        throw FormatError("count table inconsistent at node (" + std::to_string(n) + "," +
                          std::to_string(col.energies[i]) + ")");
      }
    }
  }
  if (checksum != columns[0].back[0]) throw FormatError("checksum mismatch in END line");
  return Trellis(std::move(params), band, std::move(columns));
}

void save_trellis(const Trellis& trellis, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  serialize(trellis, out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Trellis load_trellis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trellis file '" + path.string() + "'");
  return deserialize(in);
}

}  // namespace ess

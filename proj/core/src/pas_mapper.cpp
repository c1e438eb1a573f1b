#include "ess/pas_mapper.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "ess/errors.hpp"

namespace ess {

std::vector<double> map_ask(std::span<const int> amplitudes, std::span<const std::uint8_t> sign_bits) {
  if (amplitudes.size() != sign_bits.size()) {
    throw LengthError("amplitude and sign-bit counts differ (" + std::to_string(amplitudes.size()) +
                      " vs " + std::to_string(sign_bits.size()) + ")");
  }
  std::vector<double> out(amplitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (sign_bits[i] > 1) throw DomainError("sign bits must be 0 or 1");
    out[i] = sign_bits[i] ? amplitudes[i] : -amplitudes[i];
  }
  return out;
}

std::vector<Complex> map_qam(std::span<const double> ask_i, std::span<const double> ask_q) {
  if (ask_i.size() != ask_q.size()) throw LengthError("I and Q rails differ in length");
  std::vector<Complex> out(ask_i.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {ask_i[i], ask_q[i]};
  return out;
}

SymbolStream normalize(std::span<const Complex> symbols) {
  if (symbols.empty()) throw LengthError("cannot normalize an empty symbol stream");
  double power = 0.0;
  for (const auto& s : symbols) power += std::norm(s);
  power /= static_cast<double>(symbols.size());
  if (!(power > 0.0)) throw DomainError("symbol stream has zero power");
  const double scale = 1.0 / std::sqrt(power);
  SymbolStream out;
  out.avg_power = power;
  out.symbols.reserve(symbols.size());
  for (const auto& s : symbols) out.symbols.push_back(s * scale);
  return out;
}

std::vector<std::uint8_t> random_sign_bits(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> bits(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng();
    bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
  }
  return bits;
}

void write_symbols_csv(std::ostream& out, std::span<const Complex> symbols) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : symbols) out << s.real() << ',' << s.imag() << '\n';
  out.precision(old);
}

std::vector<Complex> read_symbols_csv(std::istream& in) {
  std::vector<Complex> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      std::size_t used_re = 0, used_im = 0;
      const double re = std::stod(line.substr(0, comma), &used_re);
      const std::string im_text = line.substr(comma + 1);
      const double im = std::stod(im_text, &used_im);
      if (used_re != comma || used_im != im_text.size()) throw std::invalid_argument("trailing");
      out.emplace_back(re, im);
    } catch (const std::exception&) {
      throw FormatError("symbol CSV line " + std::to_string(line_no) + " malformed");
    }
  }
  return out;
}

namespace {

constexpr char kSymMagic[8] = {'S', 'Y', 'M', 'F', '6', '4', 'v', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError("truncated binary symbol stream");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_symbols_binary(std::ostream& out, std::span<const Complex> symbols) {
  out.write(kSymMagic, sizeof(kSymMagic));
  put_le<std::uint64_t>(out, symbols.size());
  for (const auto& s : symbols) {
    put_le<double>(out, s.real());
    put_le<double>(out, s.imag());
  }
}

std::vector<Complex> read_symbols_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kSymMagic, sizeof(magic)) != 0) {
    throw FormatError("missing SYMF64v1 header");
  }
  const auto count = get_le<std::uint64_t>(in);
  std::vector<Complex> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    out.emplace_back(re, im);
  }
  return out;
}

}  // namespace ess

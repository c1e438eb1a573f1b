#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace ess {

using Complex = std::complex<double>;

struct SymbolStream {
  std::vector<Complex> symbols;
  double avg_power = 0.0;  // mean |symbol|^2 measured before normalization
};

/// s_i = (2 b_i - 1) a_i.
std::vector<double> map_ask(std::span<const int> amplitudes, std::span<const std::uint8_t> sign_bits);

std::vector<Complex> map_qam(std::span<const double> ask_i, std::span<const double> ask_q);

/// Scales to unit mean power using the power measured on this stream.
SymbolStream normalize(std::span<const Complex> symbols);

/// Seeded uniform sign bits, standing in for FEC parity.
std::vector<std::uint8_t> random_sign_bits(std::size_t count, std::uint64_t seed);

/// "re,im" per line, full double precision.
void write_symbols_csv(std::ostream& out, std::span<const Complex> symbols);
std::vector<Complex> read_symbols_csv(std::istream& in);

/// Binary layout: 8-byte magic "SYMF64v1", uint64 little-endian symbol count,
/// then count pairs of little-endian IEEE-754 float64 (re, im).
void write_symbols_binary(std::ostream& out, std::span<const Complex> symbols);
std::vector<Complex> read_symbols_binary(std::istream& in);

}  // namespace ess

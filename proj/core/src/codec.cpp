#include "ess/codec.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ess/errors.hpp"

namespace ess {

Energy sequence_energy(std::span<const int> seq) {
  Energy total = 0;
  for (int a : seq) total += static_cast<Energy>(a) * a;
  return total;
}

AmplitudeSequence encode_index(const Trellis& trellis, const BigUInt& index) {
  if (index < 0 || index >= trellis.num_sequences()) {
    throw IndexError("index " + index.str() + " outside [0, " + trellis.num_sequences().str() +
                     ")");
  }
  const int N = trellis.length();
  AmplitudeSequence seq;
  seq.reserve(static_cast<std::size_t>(N));
  BigUInt remainder = index;
  Energy energy = 0;
  for (int n = 0; n < N; ++n) {
    bool emitted = false;
    for (int a : trellis.alphabet().values()) {
      const Energy child = energy + static_cast<Energy>(a) * a;
      const BigUInt& count = trellis.back_count(n + 1, child);
      if (remainder < count) {
        seq.push_back(a);
        energy = child;
        emitted = true;
        break;
      }
      remainder -= count;
    }
    // Unreachable for a consistent trellis: children counts sum to T(n,e).
    if (!emitted) throw Error("inconsistent trellis counts during encoding");
  }
  return seq;
}

BigUInt decode_index(const Trellis& trellis, std::span<const int> seq) {
  const int N = trellis.length();
  if (static_cast<int>(seq.size()) != N) {
    throw InvalidSequenceError("sequence length " + std::to_string(seq.size()) +
                               " differs from N=" + std::to_string(N));
  }
  BigUInt index = 0;
  Energy energy = 0;
  for (int n = 0; n < N; ++n) {
    const int a = seq[static_cast<std::size_t>(n)];
    if (!trellis.alphabet().contains(a)) {
      throw InvalidSequenceError("amplitude " + std::to_string(a) + " at position " +
                                 std::to_string(n) + " is not in the alphabet");
    }
    for (int smaller : trellis.alphabet().values()) {
      if (smaller >= a) break;
      index += trellis.back_count(n + 1, energy + static_cast<Energy>(smaller) * smaller);
    }
    energy += static_cast<Energy>(a) * a;
    if (!trellis.contains(n + 1, energy)) {
      throw InvalidSequenceError("sequence leaves the trellis at position " + std::to_string(n) +
                                 " (node (" + std::to_string(n + 1) + "," +
                                 std::to_string(energy) + ") inactive)");
    }
  }
  return index;
}

BigUInt bits_to_index(std::span<const std::uint8_t> bits) {
  BigUInt value = 0;
  for (std::uint8_t b : bits) {
    value <<= 1;
    if (b) value |= 1;
  }
  return value;
}

BitBlock index_to_bits(const BigUInt& index, int k) {
  BitBlock bits(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    bits[static_cast<std::size_t>(k - 1 - i)] =
        boost::multiprecision::bit_test(index, static_cast<unsigned>(i)) ? 1 : 0;
  }
  return bits;
}

AmplitudeSequence shape(const Trellis& trellis, std::span<const std::uint8_t> bits) {
  const int k = max_shaping_bits(trellis);
  if (static_cast<int>(bits.size()) != k) {
    throw FramingError("block has " + std::to_string(bits.size()) + " bits, trellis expects k=" +
                       std::to_string(k));
  }
  return encode_index(trellis, bits_to_index(bits));
}

BitBlock deshape(const Trellis& trellis, std::span<const int> seq) {
  const int k = max_shaping_bits(trellis);
  const BigUInt index = decode_index(trellis, seq);
  if (index >= (BigUInt(1) << k)) {
    throw OutOfCodebookError("sequence index " + index.str() + " is not below 2^" +
                             std::to_string(k));
  }
  return index_to_bits(index, k);
}

bool BitReader::next_bit(std::uint8_t& bit) {
  if (remaining_ == 0) {
    const auto c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;
    byte_ = c & 0xff;
    remaining_ = 8;
  }
  --remaining_;
  bit = static_cast<std::uint8_t>((byte_ >> remaining_) & 1);
  ++bits_read_;
  return true;
}

bool BitReader::next_block(int k, BitBlock& block) {
  block.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    if (!next_bit(block[static_cast<std::size_t>(i)])) {
      if (i == 0) return false;
      throw FramingError("bit stream ends inside a block: " + std::to_string(i) + " of " +
                         std::to_string(k) + " bits after " + std::to_string(bits_read_) +
                         " bits total");
    }
  }
  // k = 0 consumes nothing and would loop forever.
  return k > 0;
}

void BitWriter::write(std::span<const std::uint8_t> bits) {
  for (std::uint8_t b : bits) {
    byte_ = (byte_ << 1) | (b & 1);
    if (++filled_ == 8) {
      out_.put(static_cast<char>(byte_));
      byte_ = 0;
      filled_ = 0;
    }
  }
}

void BitWriter::finish() {
  if (filled_ != 0) {
    throw FramingError("decoded bit count is not a multiple of 8 (" + std::to_string(filled_) +
                       " trailing bits)");
  }
  out_.flush();
}

std::size_t shape_stream(const Trellis& trellis, std::istream& bytes,
                         const SequenceHandler& handler) {
  const int k = max_shaping_bits(trellis);
  if (k == 0) {
    if (bytes.peek() != std::char_traits<char>::eof()) {
      throw FramingError("trellis carries 0 bits per block; input must be empty");
    }
    return 0;
  }
  BitReader reader(bytes);
  BitBlock block;
  std::size_t blocks = 0;
  while (reader.next_block(k, block)) {
    handler(encode_index(trellis, bits_to_index(block)));
    ++blocks;
  }
  return blocks;
}

void write_sequence(std::ostream& out, std::span<const int> seq) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out << ' ';
    out << seq[i];
  }
  out << '\n';
}

std::size_t deshape_stream(const Trellis& trellis, std::istream& amplitudes, std::ostream& bytes) {
  BitWriter writer(bytes);
  std::string line;
  std::size_t line_no = 0;
  std::size_t blocks = 0;
  AmplitudeSequence seq;
  while (std::getline(amplitudes, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    seq.clear();
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) {
      int value = 0;
      const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc{} || end != tok.data() + tok.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": bad amplitude '" + tok + "'");
      }
      seq.push_back(value);
    }
    try {
      writer.write(deshape(trellis, seq));
    } catch (const OutOfCodebookError& e) {
      throw OutOfCodebookError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InvalidSequenceError& e) {
      throw InvalidSequenceError("line " + std::to_string(line_no) + ": " + e.what());
    }
    ++blocks;
  }
  writer.finish();
  return blocks;
}

}  // namespace ess

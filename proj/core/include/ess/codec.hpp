#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ess/trellis.hpp"

namespace ess {

using AmplitudeSequence = std::vector<int>;

/// k bits, MSB first; each entry is 0 or 1.
using BitBlock = std::vector<std::uint8_t>;

Energy sequence_energy(std::span<const int> seq);

/// The (index+1)-th trellis sequence in lexicographic order (ascending
/// alphabet). Throws IndexError unless 0 <= index < T(0,0).
AmplitudeSequence encode_index(const Trellis& trellis, const BigUInt& index);

/// Inverse of encode_index. Throws InvalidSequenceError if any prefix of
/// `seq` leaves the active node set.
BigUInt decode_index(const Trellis& trellis, std::span<const int> seq);

BigUInt bits_to_index(std::span<const std::uint8_t> bits);
BitBlock index_to_bits(const BigUInt& index, int k);

/// Maps a k-bit block, k = max_shaping_bits(trellis), to its sequence. Only
/// the lexicographically first 2^k sequences are used.
AmplitudeSequence shape(const Trellis& trellis, std::span<const std::uint8_t> bits);

/// Throws OutOfCodebookError if the sequence index is >= 2^k.
BitBlock deshape(const Trellis& trellis, std::span<const int> seq);

/// Reads raw bytes (MSB first within each byte) and yields k-bit blocks.
class BitReader {
 public:
  explicit BitReader(std::istream& in) : in_(in) {}

  /// Fills `block` with the next k bits. Returns false on a clean end of
  /// stream; throws FramingError if the stream ends inside a block.
  bool next_block(int k, BitBlock& block);

  std::uint64_t bits_read() const { return bits_read_; }

 private:
  bool next_bit(std::uint8_t& bit);

  std::istream& in_;
  int byte_ = 0;
  int remaining_ = 0;
  std::uint64_t bits_read_ = 0;
};

/// Packs bits MSB first into bytes.
class BitWriter {
 public:
  explicit BitWriter(std::ostream& out) : out_(out) {}
  void write(std::span<const std::uint8_t> bits);
  /// Throws FramingError if a partial byte is pending.
  void finish();

 private:
  std::ostream& out_;
  int byte_ = 0;
  int filled_ = 0;
};

using SequenceHandler = std::function<void(const AmplitudeSequence&)>;

/// Shapes every k-bit block of `bytes` and hands the sequences to `handler`
/// in order. Returns the block count. A trailing partial block is a
/// FramingError; no padding is ever inserted.
std::size_t shape_stream(const Trellis& trellis, std::istream& bytes,
                         const SequenceHandler& handler);

/// Reads ASCII amplitude lines (space separated, one sequence per line),
/// deshapes each and writes the packed bits. Errors name the 1-based line.
std::size_t deshape_stream(const Trellis& trellis, std::istream& amplitudes, std::ostream& bytes);

void write_sequence(std::ostream& out, std::span<const int> seq);

}  // namespace ess

#pragma once

#include <stdexcept>
#include <string>

namespace ess {

// Base for every error raised by the library. Subclasses identify the failure
// class so callers (the CLI in particular) can map them to messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid construction parameters (alphabet, N, E_max, band, link settings).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A band so narrow that no path from the root reaches the final column.
class EmptyCodebookError : public Error {
 public:
  using Error::Error;
};

// Requested shaping rate is not achievable for the given N and alphabet.
class InfeasibleRateError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated, version-mismatched or checksum-failing input files.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Amplitude sequence that leaves the trellis.
class InvalidSequenceError : public Error {
 public:
  using Error::Error;
};

// Sequence lies in the trellis but its index is not one of the 2^k used ones.
class OutOfCodebookError : public Error {
 public:
  using Error::Error;
};

// Bit stream length is not a multiple of the block size.
class FramingError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf detected during numerical propagation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ess

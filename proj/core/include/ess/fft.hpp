#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace ess {

/// In-place complex FFT of a fixed length. Unnormalized in both directions;
/// forward uses exp(-j w t). Plans are built with a deterministic planner so
/// repeated runs are bit-identical. Each instance owns its plans; instances
/// are not shared between threads.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const;
  void forward(std::span<std::complex<double>> data) const;
  void inverse(std::span<std::complex<double>> data) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ess

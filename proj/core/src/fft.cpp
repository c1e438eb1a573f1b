#include "ess/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "ess/errors.hpp"

namespace ess {

namespace {
// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  std::size_t n = 0;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

Fft::Fft(std::size_t n) : impl_(std::make_unique<Impl>()) {
  if (n == 0) throw LengthError("FFT length must be positive");
  impl_->n = n;
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int len = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl_->inv = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!impl_->fwd || !impl_->inv) throw Error("FFTW planning failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

std::size_t Fft::size() const { return impl_->n; }

void Fft::forward(std::span<std::complex<double>> data) const {
  if (data.size() != impl_->n) throw LengthError("FFT input length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->fwd, buf, buf);
}

void Fft::inverse(std::span<std::complex<double>> data) const {
  if (data.size() != impl_->n) throw LengthError("FFT input length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->inv, buf, buf);
}

}  // namespace ess

#include "ess/fibersim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "ess/errors.hpp"
#include "ess/fft.hpp"

namespace ess {

void FiberParams::validate(bool allow_zero_effects) const {
  const auto check = [&](double v, const char* name, bool may_be_zero) {
    if (!std::isfinite(v) || v < 0.0 || (v == 0.0 && !may_be_zero)) {
      throw ParameterError(std::string("fiber parameter ") + name + " must be positive");
    }
  };
  check(alpha_db_per_km, "alpha_db_per_km", allow_zero_effects);
  check(dispersion_ps_nm_km, "dispersion_ps_nm_km", allow_zero_effects);
  check(gamma_per_w_km, "gamma_per_w_km", allow_zero_effects);
  check(length_km, "length_km", allow_zero_effects);
  check(ref_wavelength_nm, "ref_wavelength_nm", false);
}

double FiberParams::alpha_per_km() const { return alpha_db_per_km * std::log(10.0) / 10.0; }

double FiberParams::beta2_s2_per_km() const {
  // D [ps/(nm km)] -> s/m^2 per km of fiber: 1e-12 / 1e-9 = 1e-3 s/m/km.
  const double d_s_per_m_km = dispersion_ps_nm_km * 1e-3;
  const double lambda_m = ref_wavelength_nm * 1e-9;
  return -d_s_per_m_km * lambda_m * lambda_m / (2.0 * std::numbers::pi * kSpeedOfLight);
}

void LinkParams::validate() const {
  if (!(baud_rate_gbd > 0.0)) throw ParameterError("baud rate must be positive");
  if (!(rrc_rolloff > 0.0 && rrc_rolloff <= 1.0)) throw ParameterError("roll-off must lie in (0, 1]");
  if (sps < 4) throw ParameterError("sps must be >= 4");
  if (!(step_km > 0.0)) throw ParameterError("step_km must be positive");
  if (!std::isfinite(edfa_nf_db)) throw ParameterError("noise figure must be finite");
  if (!std::isfinite(launch_power_dbm)) throw ParameterError("launch power must be finite");
  if (rrc_span_symbols < 8 || rrc_span_symbols % 2) {
    throw ParameterError("RRC span must be even and >= 8 symbols");
  }
  if (burst_symbols < guard_symbols + 1000) {
    throw ParameterError("burst must exceed the guard ring by at least 1000 symbols");
  }
  if (guard_symbols % 2) throw ParameterError("guard ring must be even");
}

double Waveform::energy() const {
  double e = 0.0;
  for (const auto& x : samples) e += std::norm(x);
  return e;
}

double Waveform::mean_power() const {
  return samples.empty() ? 0.0 : energy() / static_cast<double>(samples.size());
}

std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps) {
  if (!(rolloff > 0.0 && rolloff <= 1.0)) throw ParameterError("roll-off must lie in (0, 1]");
  if (span_symbols < 8 || span_symbols % 2) throw ParameterError("RRC span must be even and >= 8");
  if (sps < 1) throw ParameterError("sps must be positive");
  const double pi = std::numbers::pi;
  const double b = rolloff;
  const int half = span_symbols * sps / 2;
  std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i) / sps;  // in symbol periods
    double h;
    if (i == 0) {
      h = 1.0 - b + 4.0 * b / pi;
    } else if (std::abs(std::abs(4.0 * b * t) - 1.0) < 1e-12) {
      h = b / std::sqrt(2.0) *
          ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
    } else {
      h = (std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b))) /
          (pi * t * (1.0 - 16.0 * b * b * t * t));
    }
    taps[static_cast<std::size_t>(i + half)] = h;
  }
  double energy = 0.0;
  for (double h : taps) energy += h * h;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& h : taps) h *= scale;
  return taps;
}

Waveform modulate(std::span<const Complex> symbols, int sps, std::span<const double> taps,
                  double symbol_rate_hz, Boundary boundary) {
  if (sps < 1) throw ParameterError("sps must be positive");
  if (taps.empty()) throw ParameterError("empty filter");
  Waveform out;
  out.sample_rate_hz = symbol_rate_hz * sps;
  if (symbols.empty()) return out;
  const std::size_t step = static_cast<std::size_t>(sps);
  if (boundary == Boundary::linear) {
    out.samples.assign((symbols.size() - 1) * step + taps.size(), Complex{});
    for (std::size_t m = 0; m < symbols.size(); ++m) {
      Complex* dst = out.samples.data() + m * step;
      for (std::size_t j = 0; j < taps.size(); ++j) dst[j] += symbols[m] * taps[j];
    }
  } else {
    const std::size_t len = symbols.size() * step;
    out.samples.assign(len, Complex{});
    for (std::size_t m = 0; m < symbols.size(); ++m) {
      std::size_t pos = m * step;
      for (std::size_t j = 0; j < taps.size(); ++j) {
        out.samples[pos % len] += symbols[m] * taps[j];
        ++pos;
      }
    }
  }
  return out;
}

std::vector<Complex> demodulate(const Waveform& waveform, std::span<const double> taps, int sps,
                                std::size_t delay, Boundary boundary) {
  if (sps < 1) throw ParameterError("sps must be positive");
  const auto& x = waveform.samples;
  const std::size_t len = x.size();
  const std::size_t L = taps.size();
  const std::size_t step = static_cast<std::size_t>(sps);
  std::vector<Complex> out;
  if (boundary == Boundary::linear) {
    if (len == 0 || len - 1 < delay) {
      throw LengthError("waveform of " + std::to_string(len) +
                        " samples is shorter than the filter delay " + std::to_string(delay));
    }
    const std::size_t count = (len - 1 - delay) / step + 1;
    out.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
      const std::size_t i = delay + m * step;
      Complex acc{};
      // y[i] = sum_j x[i-j] taps[L-1-j]
      for (std::size_t j = 0; j < L && j <= i; ++j) {
        if (i - j < len) acc += x[i - j] * taps[L - 1 - j];
      }
      out[m] = acc;
    }
  } else {
    if (len == 0 || len % step) throw LengthError("circular waveform length must be a multiple of sps");
    const std::size_t count = len / step;
    out.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
      const std::size_t i = (delay + m * step) % len;
      Complex acc{};
      for (std::size_t j = 0; j < L; ++j) {
        const std::size_t src = (i + len * (1 + j / len) - j) % len;
        acc += x[src] * taps[L - 1 - j];
      }
      out[m] = acc;
    }
  }
  return out;
}

Waveform scale_to_power(Waveform waveform, double power_w) {
  const double p = waveform.mean_power();
  if (!(p > 0.0)) throw DomainError("cannot scale a zero-power waveform");
  if (!(power_w >= 0.0)) throw DomainError("target power must be nonnegative");
  const double g = std::sqrt(power_w / p);
  for (auto& x : waveform.samples) x *= g;
  return waveform;
}

namespace {

std::vector<double> angular_frequencies(std::size_t n, double sample_rate_hz) {
  std::vector<double> w(n);
  const double df = sample_rate_hz / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double bin = k < (n + 1) / 2 ? static_cast<double>(k)
                                       : static_cast<double>(k) - static_cast<double>(n);
    w[k] = 2.0 * std::numbers::pi * bin * df;
  }
  return w;
}

// exp((j beta2/2 w^2 - alpha/2) dz) / n; the 1/n completes the inverse FFT.
std::vector<Complex> linear_operator(std::span<const double> omega, double beta2, double alpha,
                                     double dz) {
  std::vector<Complex> h(omega.size());
  const double norm = 1.0 / static_cast<double>(omega.size());
  const double amp = std::exp(-0.5 * alpha * dz) * norm;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    h[k] = std::polar(amp, 0.5 * beta2 * omega[k] * omega[k] * dz);
  }
  return h;
}

void check_finite(std::span<const Complex> x, double z_km) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  if (!std::isfinite(acc)) {
    throw NumericalError("non-finite field after " + std::to_string(z_km) +
                         " km; reduce step_km or launch power");
  }
}

}  // namespace

Waveform ssfm_span(const Waveform& input, const FiberParams& fiber, double step_km,
                   std::optional<double> launch_power_w) {
  fiber.validate(true);
  if (input.samples.empty()) throw LengthError("empty waveform");
  if (!(step_km > 0.0)) throw ParameterError("step_km must be positive");
  Waveform out = launch_power_w ? scale_to_power(input, *launch_power_w) : input;
  check_finite(out.samples, 0.0);

  const double length = fiber.length_km;
  if (length == 0.0) return out;
  const auto nsteps = static_cast<std::size_t>(std::ceil(length / step_km - 1e-9));
  std::vector<double> dz(nsteps, step_km);
  dz.back() = length - step_km * static_cast<double>(nsteps - 1);

  const std::size_t n = out.samples.size();
  const Fft fft(n);
  const auto omega = angular_frequencies(n, out.sample_rate_hz);
  const double beta2 = fiber.beta2_s2_per_km();
  const double alpha = fiber.alpha_per_km();
  const double gamma = fiber.gamma_per_w_km;

  std::map<double, std::vector<Complex>> cache;
  auto& x = out.samples;
  const auto apply_linear = [&](double h) {
    auto it = cache.find(h);
    if (it == cache.end()) it = cache.emplace(h, linear_operator(omega, beta2, alpha, h)).first;
    const auto& op = it->second;
    fft.forward(x);
    for (std::size_t k = 0; k < n; ++k) x[k] *= op[k];
    fft.inverse(x);
  };

  double z = 0.0;
  double pending = 0.5 * dz[0];
  for (std::size_t s = 0; s < nsteps; ++s) {
    apply_linear(pending);
    if (gamma != 0.0) {
      const double g = gamma * dz[s];
      for (auto& v : x) {
        const double phase = g * std::norm(v);
        v *= Complex(std::cos(phase), std::sin(phase));
      }
    }
    z += dz[s];
    pending = 0.5 * dz[s] + (s + 1 < nsteps ? 0.5 * dz[s + 1] : 0.0);
    if (s % 16 == 15) check_finite(x, z);
  }
  apply_linear(pending);
  check_finite(x, length);
  return out;
}

Waveform edfa(const Waveform& input, double gain_db, double nf_db, std::uint64_t seed,
              double carrier_hz) {
  if (!(gain_db >= 0.0)) throw ParameterError("EDFA gain must be >= 0 dB");
  const double gain = std::pow(10.0, gain_db / 10.0);
  const double n_sp = std::pow(10.0, nf_db / 10.0) / 2.0;
  const double psd = n_sp * (gain - 1.0) * kPlanck * carrier_hz;
  const double variance = psd * input.sample_rate_hz;

  Waveform out = input;
  const double amp = std::sqrt(gain);
  for (auto& v : out.samples) v *= amp;
  if (variance > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    for (auto& v : out.samples) {
      const double re = normal(rng);
      const double im = normal(rng);
      v += Complex(re, im);
    }
  }
  return out;
}

Waveform cd_compensate(const Waveform& input, const FiberParams& fiber) {
  Waveform out = input;
  if (out.samples.empty() || fiber.length_km == 0.0) return out;
  const std::size_t n = out.samples.size();
  const Fft fft(n);
  const auto omega = angular_frequencies(n, out.sample_rate_hz);
  const auto op = linear_operator(omega, -fiber.beta2_s2_per_km(), 0.0, fiber.length_km);
  fft.forward(out.samples);
  for (std::size_t k = 0; k < n; ++k) out.samples[k] *= op[k];
  fft.inverse(out.samples);
  return out;
}

double effective_snr(std::span<const Complex> tx, std::span<const Complex> rx) {
  if (tx.size() != rx.size()) throw LengthError("tx and rx symbol counts differ");
  if (tx.size() < 1000) throw LengthError("effective SNR needs at least 1000 symbols");
  Complex cross{};
  double tx_energy = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    cross += rx[i] * std::conj(tx[i]);
    tx_energy += std::norm(tx[i]);
  }
  if (!(tx_energy > 0.0)) throw DomainError("reference symbols have zero power");
  const Complex a = cross / tx_energy;
  double err = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) err += std::norm(rx[i] - a * tx[i]);
  const double signal = std::norm(a) * tx_energy;
  if (!(signal > 0.0)) throw DomainError("received symbols carry no signal component");
  if (err <= signal * std::pow(10.0, -kSnrCapDb / 10.0)) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / err));
}

double ase_limited_snr_db(const LinkParams& link, const FiberParams& fiber) {
  const double gain = std::pow(10.0, fiber.span_loss_db() / 10.0);
  const double n_sp = std::pow(10.0, link.edfa_nf_db / 10.0) / 2.0;
  const double noise = n_sp * (gain - 1.0) * kPlanck * fiber.carrier_hz() * link.symbol_rate_hz();
  return 10.0 * std::log10(dbm_to_watt(link.launch_power_dbm) / noise);
}

}  // namespace ess

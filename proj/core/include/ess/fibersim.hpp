#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ess {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPlanck = 6.62607015e-34;     // J s

struct FiberParams {
  double alpha_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;
  double gamma_per_w_km = 1.3;
  double length_km = 205.0;
  double ref_wavelength_nm = 1550.0;

  /// Throws ParameterError unless every field is positive. Physics tests
  /// switch individual effects off, so zero is accepted for alpha, D and
  /// gamma when `allow_zero_effects` is set.
  void validate(bool allow_zero_effects = false) const;

  /// Power attenuation in 1/km.
  double alpha_per_km() const;
  /// beta2 = -D lambda^2 / (2 pi c), in s^2/km.
  double beta2_s2_per_km() const;
  double carrier_hz() const { return kSpeedOfLight / (ref_wavelength_nm * 1e-9); }
  double span_loss_db() const { return alpha_db_per_km * length_km; }
};

struct LinkParams {
  double baud_rate_gbd = 50.0;
  double rrc_rolloff = 0.1;
  double edfa_nf_db = 5.0;
  double launch_power_dbm = 0.0;
  int sps = 16;
  double step_km = 0.1;
  std::uint64_t seed = 1;
  std::size_t burst_symbols = std::size_t{1} << 14;
  int rrc_span_symbols = 64;
  std::size_t guard_symbols = 512;  // discarded, half at each end of the burst

  void validate() const;
  double symbol_rate_hz() const { return baud_rate_gbd * 1e9; }
  double sample_rate_hz() const { return symbol_rate_hz() * sps; }
};

struct Waveform {
  std::vector<Complex> samples;
  double sample_rate_hz = 1.0;

  double mean_power() const;
  double energy() const;  // sum |x|^2
};

enum class Boundary { linear, circular };

/// Root-raised-cosine taps over span_symbols*sps+1 samples, unit energy. The
/// t=0 and t=+-T/(4 rolloff) points use their analytic limits.
std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps);

/// Upsamples by sps and filters with `taps`. Linear mode yields
/// (n-1)*sps + taps.size() samples; circular mode yields n*sps samples and
/// wraps the filter tails around the burst.
Waveform modulate(std::span<const Complex> symbols, int sps, std::span<const double> taps,
                  double symbol_rate_hz = 1.0, Boundary boundary = Boundary::linear);

/// Matched filter, delay compensation and downsampling. In linear mode symbol
/// m is taken from matched-filter output delay + m*sps, as long as that
/// sample has full filter support; circular mode returns size/sps symbols.
/// Throws LengthError when no symbol survives the delay.
std::vector<Complex> demodulate(const Waveform& waveform, std::span<const double> taps, int sps,
                                std::size_t delay, Boundary boundary = Boundary::linear);

/// Rescales to the given mean power in watts.
Waveform scale_to_power(Waveform waveform, double power_w);

/// Symmetric split-step Fourier integration of the scalar NLSE over one span:
///   dA/dz = -(alpha/2) A + j (beta2/2) w^2 A (frequency domain) + j gamma |A|^2 A
/// Steps are step_km long with one shorter final step when step_km does not
/// divide the span. Adjacent half linear steps are merged. The FFT boundary
/// is circular. When `launch_power_w` is set the input is first rescaled to
/// that mean power. Throws NumericalError on NaN/Inf.
Waveform ssfm_span(const Waveform& input, const FiberParams& fiber, double step_km,
                   std::optional<double> launch_power_w = std::nullopt);

/// Amplifies by gain_db and adds circular white Gaussian ASE with PSD
/// n_sp (G-1) h nu, n_sp = NF/2, total variance PSD * sample_rate.
Waveform edfa(const Waveform& input, double gain_db, double nf_db, std::uint64_t seed,
              double carrier_hz = kSpeedOfLight / 1550e-9);

/// Multiplies the spectrum by exp(-j (beta2/2) w^2 L).
Waveform cd_compensate(const Waveform& input, const FiberParams& fiber);

inline constexpr double kSnrCapDb = 60.0;

/// Removes the best complex scale a = <rx,tx>/<tx,tx> and reports
/// |a|^2 E|tx|^2 / E|rx - a tx|^2 in dB, capped at kSnrCapDb.
double effective_snr(std::span<const Complex> tx, std::span<const Complex> rx);

/// Launch power over ASE power in the symbol bandwidth, n_sp (G-1) h nu Rs,
/// with G compensating the span loss.
double ase_limited_snr_db(const LinkParams& link, const FiberParams& fiber);

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

}  // namespace ess

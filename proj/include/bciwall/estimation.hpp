#ifndef BCIWALL_ESTIMATION_HPP
#define BCIWALL_ESTIMATION_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "bciwall/recording.hpp"

namespace bciwall {

// Average power (1/N) sum x^2, which for zero-mean data is the variance.
double mean_power(std::span<const double> x);

// Mean power of every length-tau window, one value per start position
// (length - tau + 1 of them). Backed by the blocked streaming kernel.
std::vector<double> sliding_window_power(std::span<const double> x, std::size_t tau);

// Sliding-window variance extrema and the noise-uncertainty ratio
// rho = sqrt(sigma2_max / sigma2_min). The nominal variance is the geometric
// mean of the extrema.
struct NoiseProfile {
  double sigma2_min = 0.0;      // uV^2
  double sigma2_max = 0.0;      // uV^2
  double sigma2_nominal = 0.0;  // uV^2
  double rho = 1.0;
  std::size_t window_samples = 0;
  std::size_t window_positions = 0;
};

// sigma2_floor guards against dead channels: a minimum variance below the
// floor is rejected as degenerate data rather than reported as infinite rho.
NoiseProfile noise_profile(std::span<const double> x, std::size_t tau,
                           double sigma2_floor = 1e-12);

// Stimulus-locked average. `samples` covers [-pre_stimulus, +post] around the
// stimulus; index pre_stimulus_samples is the stimulus onset.
struct EvokedPotential {
  std::vector<double> samples;  // uV
  std::size_t pre_stimulus_samples = 0;
  std::size_t trial_count = 0;
  double sample_rate_hz = 0.0;

  std::size_t post_stimulus_size() const { return samples.size() - pre_stimulus_samples; }
};

EvokedPotential evoked_average(const std::vector<std::vector<double>>& trials,
                               std::size_t pre_stimulus_samples, double sample_rate_hz);

// Cut one epoch per trigger out of a recording. Triggers whose epoch would
// run past either end are skipped.
std::vector<std::vector<double>> slice_epochs(const Recording& rec, double pre_ms,
                                              double post_ms);

struct PeakWindow {
  double lo_ms = 250.0;
  double hi_ms = 500.0;
};

// Conscious-signal power taken from the evoked-potential peak.
//   t_time = c_max^2, t_freq = t_time * (1 - reduction_fraction)
struct SignalPowerEstimate {
  double t_time = 0.0;             // uV^2
  double t_freq = 0.0;             // uV^2
  double reduction_fraction = 0.4;
  double c_max = 0.0;              // uV
};

// c_max is the largest |ep[m]| in the post-stimulus search window after
// subtracting the pre-stimulus baseline mean (last baseline_ms before onset).
SignalPowerEstimate peak_signal_power(const EvokedPotential& ep, const PeakWindow& window,
                                      double reduction_fraction = 0.4,
                                      double baseline_ms = 200.0);

// Mean power of the whole filtered recording, after dropping the first
// discard_start_s seconds of filter transient.
double noise_variance_global(const Recording& filtered, double discard_start_s = 0.0);

// Discrete Fourier transform of a real signal.
struct Spectrum {
  std::vector<std::complex<double>> coeffs;  // X[k], k = 0..N-1
  double sample_rate_hz = 0.0;

  std::size_t size() const { return coeffs.size(); }
  double bin_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate_hz / static_cast<double>(coeffs.size());
  }
};

Spectrum spectrum(std::span<const double> x, double sample_rate_hz);

// Periodogram power summed over bins with lo_hz <= f <= hi_hz, conjugate
// bins included, so that summing over (0, Nyquist) recovers the signal's
// mean power minus its DC and Nyquist terms (Parseval).
double band_power(std::span<const double> x, double lo_hz, double hi_hz,
                  double sample_rate_hz);

}  // namespace bciwall

#endif

#ifndef BCIWALL_FILTERS_HPP
#define BCIWALL_FILTERS_HPP

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bciwall/recording.hpp"

namespace bciwall {

// One second-order section, a0 normalized to 1:
//   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct BiquadCoeffs {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  // Poles strictly inside the unit circle (stability triangle).
  bool is_stable() const;
};

enum class StageKind { Biquad, FirstDifference, PassThrough };

struct FilterStage {
  StageKind kind = StageKind::PassThrough;
  BiquadCoeffs coeffs{};
  std::string label;
};

enum class Scenario { A, B, C, D };

Scenario scenario_from_string(const std::string& tag);
std::string to_string(Scenario scenario);

// A causal chain of stages applied in order. Order matters: IIR cascades
// commute only in exact arithmetic, so the order is part of the contract.
struct FilterChain {
  std::vector<FilterStage> stages;
  double sample_rate_hz = 0.0;
  std::optional<Scenario> scenario;

  bool has_stage(const std::string& label_prefix) const;
};

struct FilterSettings {
  double dc_cutoff_hz = 0.5;
  double notch_center_hz = 50.0;
  double notch_bandwidth_hz = 4.0;
};

// 2nd-order Butterworth bandpass (analog prototype order 2, bilinear transform
// with frequency pre-warping). Two biquad sections, exact zeros at DC and
// Nyquist, unit gain at the band center.
FilterChain design_butterworth_bandpass(double lo_hz, double hi_hz, double sample_rate_hz);

// 2nd-order Butterworth highpass used for DC removal.
FilterChain design_dc_removal(double cutoff_hz, double sample_rate_hz);

// 2nd-order IIR notch with a -3 dB bandwidth of bandwidth_hz around center_hz.
FilterChain design_powerline_notch(double center_hz, double sample_rate_hz,
                                   double bandwidth_hz = 4.0);

// y[n] = x[n] - x[n-1], x[-1] taken as 0.
std::vector<double> first_difference(std::span<const double> x);

// The four pre-processing chains:
//   A: DC removal + powerline notch
//   B: first difference + DC removal + notch
//   C: Butterworth bandpass 8-18 Hz + DC removal + notch
//   D: Butterworth bandpass 8-12 Hz + DC removal + notch
FilterChain scenario_chain(Scenario scenario, double sample_rate_hz,
                           const FilterSettings& settings = {});

// Causal sample-by-sample application, zero initial conditions. Output length
// equals input length.
std::vector<double> apply_chain(const FilterChain& chain, std::span<const double> x);
Recording apply_chain(const FilterChain& chain, const Recording& rec);

// Frequency response H(e^{j 2 pi f / fs}). f = 0 and f = fs/2 are evaluated
// at exactly z = +1 / z = -1 so structural zeros come out as exact zeros.
std::complex<double> chain_response(const FilterChain& chain, double freq_hz);

std::string chain_description(const FilterChain& chain);

}  // namespace bciwall

#endif

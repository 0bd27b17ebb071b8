#include "bciwall/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bciwall/errors.hpp"
#include "bciwall/kernels.hpp"

namespace bciwall {

double mean_power(std::span<const double> x) {
  if (x.empty()) throw DataError("mean_power: empty input");
  long double acc = 0.0L;
  for (double v : x) acc += static_cast<long double>(v) * v;
  return static_cast<double>(acc / static_cast<long double>(x.size()));
}

std::vector<double> sliding_window_power(std::span<const double> x, std::size_t tau) {
  return kernels::sliding_mean_power(x, tau);
}

NoiseProfile noise_profile(std::span<const double> x, std::size_t tau, double sigma2_floor) {
  const std::vector<double> windows = kernels::sliding_mean_power(x, tau);

  NoiseProfile profile;
  profile.window_samples = tau;
  profile.window_positions = windows.size();
  auto [lo, hi] = std::minmax_element(windows.begin(), windows.end());
  profile.sigma2_min = *lo;
  profile.sigma2_max = *hi;

  if (profile.sigma2_min < sigma2_floor) {
    throw DataError("degenerate noise: minimum window variance " +
                    std::to_string(profile.sigma2_min) + " uV^2 is below the floor (" +
                    std::to_string(sigma2_floor) + " uV^2), broken electrode?");
  }
  profile.rho = std::sqrt(profile.sigma2_max / profile.sigma2_min);
  profile.sigma2_nominal = std::sqrt(profile.sigma2_min * profile.sigma2_max);
  return profile;
}

EvokedPotential evoked_average(const std::vector<std::vector<double>>& trials,
                               std::size_t pre_stimulus_samples, double sample_rate_hz) {
  if (trials.empty()) throw DataError("evoked_average: no trials");
  const std::size_t len = trials.front().size();
  if (len == 0) throw DataError("evoked_average: empty trials");
  if (pre_stimulus_samples >= len) {
    throw ConfigError("evoked_average: pre-stimulus segment covers the whole epoch");
  }
  for (std::size_t t = 1; t < trials.size(); ++t) {
    if (trials[t].size() != len) {
      throw DataError("evoked_average: trial " + std::to_string(t) + " has length " +
                      std::to_string(trials[t].size()) + ", expected " + std::to_string(len));
    }
  }

  EvokedPotential ep;
  ep.samples.assign(len, 0.0);
  ep.pre_stimulus_samples = pre_stimulus_samples;
  ep.trial_count = trials.size();
  ep.sample_rate_hz = sample_rate_hz;
  for (const auto& trial : trials) {
    for (std::size_t m = 0; m < len; ++m) ep.samples[m] += trial[m];
  }
  const double inv = 1.0 / static_cast<double>(trials.size());
  for (double& v : ep.samples) v *= inv;
  return ep;
}

std::vector<std::vector<double>> slice_epochs(const Recording& rec, double pre_ms,
                                              double post_ms) {
  if (rec.triggers.empty()) throw DataError("slice_epochs: recording has no triggers");
  if (!(rec.sample_rate_hz > 0.0)) throw ConfigError("slice_epochs: invalid sample rate");
  const auto pre = static_cast<std::size_t>(std::lround(pre_ms * 1e-3 * rec.sample_rate_hz));
  const auto post = static_cast<std::size_t>(std::lround(post_ms * 1e-3 * rec.sample_rate_hz));
  if (pre + post == 0) throw ConfigError("slice_epochs: zero-length epoch");

  std::vector<std::vector<double>> epochs;
  for (std::size_t onset : rec.triggers) {
    if (onset < pre || onset + post > rec.samples.size()) continue;
    epochs.emplace_back(rec.samples.begin() + static_cast<std::ptrdiff_t>(onset - pre),
                        rec.samples.begin() + static_cast<std::ptrdiff_t>(onset + post));
  }
  if (epochs.empty()) throw DataError("slice_epochs: no trigger leaves room for a full epoch");
  return epochs;
}

SignalPowerEstimate peak_signal_power(const EvokedPotential& ep, const PeakWindow& window,
                                      double reduction_fraction, double baseline_ms) {
  if (!(reduction_fraction >= 0.0) || !(reduction_fraction < 1.0)) {
    throw ConfigError("reduction fraction must lie in [0, 1)");
  }
  if (!(window.lo_ms >= 0.0) || !(window.lo_ms < window.hi_ms)) {
    throw ConfigError("peak search window must satisfy 0 <= lo < hi");
  }
  const double fs = ep.sample_rate_hz;
  if (!(fs > 0.0)) throw ConfigError("evoked potential has no sample rate");

  // Baseline: mean of the last baseline_ms before stimulus onset (or the whole
  // pre-stimulus segment if it is shorter).
  double baseline = 0.0;
  if (ep.pre_stimulus_samples > 0) {
    auto want = static_cast<std::size_t>(std::lround(baseline_ms * 1e-3 * fs));
    const std::size_t take = std::min(std::max<std::size_t>(want, 1), ep.pre_stimulus_samples);
    long double acc = 0.0L;
    for (std::size_t i = ep.pre_stimulus_samples - take; i < ep.pre_stimulus_samples; ++i) {
      acc += ep.samples[i];
    }
    baseline = static_cast<double>(acc / static_cast<long double>(take));
  }

  const std::size_t onset = ep.pre_stimulus_samples;
  auto lo = onset + static_cast<std::size_t>(std::lround(window.lo_ms * 1e-3 * fs));
  auto hi = onset + static_cast<std::size_t>(std::lround(window.hi_ms * 1e-3 * fs));
  hi = std::min(hi, ep.samples.size());
  if (lo >= hi) throw ConfigError("peak search window lies outside the epoch");

  double c_max = 0.0;
  for (std::size_t m = lo; m < hi; ++m) {
    c_max = std::max(c_max, std::abs(ep.samples[m] - baseline));
  }

  SignalPowerEstimate estimate;
  estimate.c_max = c_max;
  estimate.t_time = c_max * c_max;
  estimate.reduction_fraction = reduction_fraction;
  estimate.t_freq = estimate.t_time * (1.0 - reduction_fraction);
  return estimate;
}

double noise_variance_global(const Recording& filtered, double discard_start_s) {
  if (!(discard_start_s >= 0.0)) throw ConfigError("discard time must be non-negative");
  const auto skip =
      static_cast<std::size_t>(std::lround(discard_start_s * filtered.sample_rate_hz));
  if (skip >= filtered.samples.size()) {
    throw DataError("noise_variance_global: discard interval swallows the whole recording");
  }
  return mean_power(std::span<const double>(filtered.samples).subspan(skip));
}

}  // namespace bciwall

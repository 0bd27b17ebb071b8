#include "bciwall/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bciwall/detection.hpp"
#include "bciwall/errors.hpp"
#include "bciwall/kernels.hpp"
#include "bciwall/rng.hpp"

namespace bciwall {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> render_conscious(const ConsciousKind& kind, const Placement& placement,
                                     std::size_t total, double fs) {
  const std::size_t span = placement.length == 0 ? total - placement.start : placement.length;
  if (placement.start > total || placement.start + span > total) {
    throw ConfigError("embed_conscious_signal: placement runs past the end of the noise");
  }

  std::vector<double> c(total, 0.0);
  if (std::holds_alternative<SinusoidSignal>(kind)) {
    const auto& s = std::get<SinusoidSignal>(kind);
    for (std::size_t n = 0; n < span; ++n) {
      c[placement.start + n] =
          s.amplitude * std::sin(2.0 * kPi * s.freq_hz * static_cast<double>(n) / fs);
    }
  } else {
    const auto& p = std::get<P300Template>(kind);
    const double peak_s = p.latency_s;
    const double half = p.width_s / 2.0;
    for (std::size_t n = 0; n < span; ++n) {
      const double t = static_cast<double>(n) / fs;
      if (t < peak_s - half || t > peak_s + half) continue;
      c[placement.start + n] =
          p.amplitude * 0.5 * (1.0 + std::cos(kPi * (t - peak_s) / half));
    }
  }
  return c;
}

}  // namespace

void VarianceProfile::validate(std::size_t n_samples) const {
  if (segments.empty()) throw ConfigError("variance profile has no segments");
  std::size_t expected = 0;
  for (const auto& seg : segments) {
    if (seg.start != expected || seg.end <= seg.start) {
      throw ConfigError("variance profile segments must tile [0, N) in order");
    }
    if (!(seg.sigma2 >= 0.0)) throw ConfigError("segment variance must be non-negative");
    expected = seg.end;
  }
  if (expected != n_samples) {
    throw ConfigError("variance profile covers " + std::to_string(expected) +
                      " samples, signal has " + std::to_string(n_samples));
  }
}

std::vector<double> generate_piecewise_gaussian(const VarianceProfile& profile,
                                                std::size_t n_samples, std::uint64_t seed) {
  profile.validate(n_samples);
  std::vector<double> x(n_samples);
  GaussianStream gauss = gaussian_stream(seed, 0);
  for (const auto& seg : profile.segments) {
    const double sigma = std::sqrt(seg.sigma2);
    for (std::size_t n = seg.start; n < seg.end; ++n) x[n] = sigma * gauss.next();
  }
  return x;
}

SyntheticComposition embed_conscious_signal(std::vector<double> noise,
                                            const ConsciousKind& kind,
                                            const Placement& placement,
                                            double sample_rate_hz) {
  if (noise.empty()) throw DataError("embed_conscious_signal: empty noise");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("embed_conscious_signal: invalid rate");

  SyntheticComposition comp;
  comp.conscious = render_conscious(kind, placement, noise.size(), sample_rate_hz);
  comp.background = std::move(noise);
  comp.artefact.assign(comp.background.size(), 0.0);
  comp.composed.resize(comp.background.size());
  for (std::size_t n = 0; n < comp.composed.size(); ++n) {
    comp.composed[n] = comp.artefact[n] + comp.background[n] + comp.conscious[n];
  }
  return comp;
}

EmpiricalRates simulate_detector(const HypothesisCase& hypothesis, double gamma,
                                 std::size_t window_n, std::uint64_t trials, double sigma2,
                                 std::uint64_t seed) {
  if (window_n == 0) throw ConfigError("simulate_detector: window must be >= 1");
  if (trials == 0) throw ConfigError("simulate_detector: need at least one trial");
  if (!(sigma2 > 0.0)) throw ConfigError("simulate_detector: noise variance must be positive");
  if (hypothesis.tag == Hypothesis::H0 && hypothesis.t_c != 0.0) {
    throw ConfigError("simulate_detector: H0 must carry no signal power");
  }
  if (!(hypothesis.t_c >= 0.0)) throw ConfigError("simulate_detector: negative signal power");

  const double variance = sigma2 + hypothesis.t_c;
  const std::uint64_t hits =
      kernels::count_energy_exceedances(variance, window_n, trials, gamma, seed, 0);
  const double rate = static_cast<double>(hits) / static_cast<double>(trials);

  EmpiricalRates rates;
  rates.trials = trials;
  rates.gamma = gamma;
  rates.window = window_n;
  rates.std_error = std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rates.false_alarm_rate = hypothesis.tag == Hypothesis::H0 ? rate : nan;
  rates.detection_rate = hypothesis.tag == Hypothesis::H1 ? rate : nan;
  return rates;
}

RatePair simulate_rate_pair(double t_c, double gamma, std::size_t window_n,
                            std::uint64_t trials, double sigma2, std::uint64_t seed,
                            double rho) {
  NoiseUncertainty{rho}.validate();
  // Disjoint stream ranges keep the two hypotheses independent.
  const std::uint64_t h0_hits = kernels::count_energy_exceedances(
      rho * sigma2, window_n, trials, gamma, seed, 0);
  const std::uint64_t h1_hits = kernels::count_energy_exceedances(
      sigma2 / rho + t_c, window_n, trials, gamma, seed, trials);

  RatePair pair;
  pair.false_alarm_rate = static_cast<double>(h0_hits) / static_cast<double>(trials);
  pair.detection_rate = static_cast<double>(h1_hits) / static_cast<double>(trials);
  return pair;
}

SeparationReport worst_case_separation(double snr, double rho, double sigma2_nominal,
                                       std::size_t window_n) {
  NoiseUncertainty{rho}.validate();
  if (!(sigma2_nominal > 0.0)) throw ConfigError("worst_case_separation: invalid variance");
  if (!(snr >= 0.0)) throw ConfigError("worst_case_separation: negative SNR");

  SeparationReport report;
  report.snr = snr;
  report.rho = rho;
  report.wall = snr_wall(rho);
  report.window = window_n;
  report.h0_worst_mean = rho * sigma2_nominal;
  report.h1_worst_mean = snr * sigma2_nominal + sigma2_nominal / rho;
  report.separated = report.h1_worst_mean > report.h0_worst_mean;
  return report;
}

std::vector<RocPoint> worst_case_roc(double snr, double rho, double sigma2,
                                     std::size_t window_n, std::uint64_t trials_per_case,
                                     std::size_t n_thresholds, std::uint64_t seed) {
  NoiseUncertainty{rho}.validate();
  if (!(sigma2 > 0.0)) throw ConfigError("worst_case_roc: invalid variance");
  if (trials_per_case < 1000) throw ConfigError("worst_case_roc: need >= 1000 trials");
  if (n_thresholds < 2) throw ConfigError("worst_case_roc: need >= 2 thresholds");

  const double t_c = snr * sigma2;
  std::vector<double> h0 =
      kernels::energy_statistics(rho * sigma2, window_n, trials_per_case, seed, 0);
  std::vector<double> h1 = kernels::energy_statistics(
      sigma2 / rho + t_c, window_n, trials_per_case, seed, trials_per_case);

  std::sort(h0.begin(), h0.end());
  std::sort(h1.begin(), h1.end());
  const double lo = std::min(h0.front(), h1.front());
  const double hi = std::max(h0.back(), h1.back());

  auto exceed_fraction = [](const std::vector<double>& sorted, double gamma) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), gamma);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
  };

  std::vector<RocPoint> roc(n_thresholds);
  for (std::size_t i = 0; i < n_thresholds; ++i) {
    const double gamma =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_thresholds - 1);
    roc[i] = {gamma, exceed_fraction(h0, gamma), exceed_fraction(h1, gamma)};
  }
  return roc;
}

}  // namespace bciwall

#ifndef BCIWALL_SIMULATION_HPP
#define BCIWALL_SIMULATION_HPP

#include <cstdint>
#include <variant>
#include <vector>

// Synthetic-signal generation and Monte Carlo detector simulation: the
// independent check on every closed-form detection result, and the source of
// desk-scale test data.

namespace bciwall {

struct VarianceSegment {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  double sigma2 = 0.0;
};

// Segments must tile [0, n) without gaps or overlap.
struct VarianceProfile {
  std::vector<VarianceSegment> segments;

  void validate(std::size_t n_samples) const;
};

// Zero-mean independent Gaussian samples with segment-wise variance.
std::vector<double> generate_piecewise_gaussian(const VarianceProfile& profile,
                                                std::size_t n_samples, std::uint64_t seed);

struct SinusoidSignal {
  double freq_hz = 10.0;
  double amplitude = 1.0;  // uV, so T(c) = amplitude^2 / 2 over whole periods
};

// Raised-cosine pulse peaking `latency_s` after its placement start.
struct P300Template {
  double amplitude = 5.0;  // uV at the peak
  double latency_s = 0.3;
  double width_s = 0.2;
};

using ConsciousKind = std::variant<SinusoidSignal, P300Template>;

struct Placement {
  std::size_t start = 0;
  std::size_t length = 0;  // 0 = to the end of the noise
};

struct SyntheticComposition {
  std::vector<double> conscious;   // c[n]
  std::vector<double> background;  // b[n]
  std::vector<double> artefact;    // a[n]
  std::vector<double> composed;    // a[n] + b[n] + c[n], summed in that order
  VarianceProfile profile;
  std::uint64_t seed = 0;
};

// Additively embeds a conscious component into `noise` (kept as the
// background part; the artefact part is zero unless composed separately).
SyntheticComposition embed_conscious_signal(std::vector<double> noise,
                                            const ConsciousKind& kind,
                                            const Placement& placement,
                                            double sample_rate_hz);

enum class Hypothesis { H0, H1 };

// Under H1 a random conscious component of average power t_c rides on the
// noise, so window samples are N(0, sigma2 + t_c); under H0 they are
// N(0, sigma2).
struct HypothesisCase {
  Hypothesis tag = Hypothesis::H0;
  double t_c = 0.0;

  static HypothesisCase null_case() { return {Hypothesis::H0, 0.0}; }
  static HypothesisCase signal_case(double t_c) { return {Hypothesis::H1, t_c}; }
};

struct EmpiricalRates {
  std::uint64_t trials = 0;
  double false_alarm_rate = 0.0;  // NaN when the case is H1
  double detection_rate = 0.0;    // NaN when the case is H0
  double gamma = 0.0;
  std::size_t window = 0;
  double std_error = 0.0;  // binomial standard error of the measured rate
};

// Draws `trials` windows of window_n samples under the case, thresholds the
// mean power at gamma. Trials are independent streams of (seed, trial), so
// the result is identical whether the loop runs serial or parallel.
EmpiricalRates simulate_detector(const HypothesisCase& hypothesis, double gamma,
                                 std::size_t window_n, std::uint64_t trials, double sigma2,
                                 std::uint64_t seed);

// Convenience pair: H0 and H1 rates at the same threshold from disjoint
// streams. H1 uses worst-case variances when rho > 1.
struct RatePair {
  double false_alarm_rate = 0.0;
  double detection_rate = 0.0;
};
RatePair simulate_rate_pair(double t_c, double gamma, std::size_t window_n,
                            std::uint64_t trials, double sigma2, std::uint64_t seed,
                            double rho = 1.0);

// Mean test statistics of the worst-case hypothesis pair under noise
// uncertainty rho. When SNR <= rho - 1/rho the H1 mean does not exceed the
// H0 mean, for any window length.
struct SeparationReport {
  double h0_worst_mean = 0.0;  // rho * sigma2
  double h1_worst_mean = 0.0;  // t_c + sigma2 / rho
  bool separated = false;
  double snr = 0.0;
  double rho = 1.0;
  double wall = 0.0;
  std::size_t window = 0;
};
SeparationReport worst_case_separation(double snr, double rho, double sigma2_nominal,
                                       std::size_t window_n);

struct RocPoint {
  double gamma = 0.0;
  double p_false_alarm = 0.0;
  double p_detection = 0.0;
};

// Empirical ROC of the worst-case pair: H0 at variance rho*sigma2, H1 at
// signal power snr*sigma2 over variance sigma2/rho. Thresholds are evenly
// spaced across the pooled statistic range.
std::vector<RocPoint> worst_case_roc(double snr, double rho, double sigma2,
                                     std::size_t window_n, std::uint64_t trials_per_case,
                                     std::size_t n_thresholds, std::uint64_t seed);

}  // namespace bciwall

#endif

#ifndef BCIWALL_DETECTION_HPP
#define BCIWALL_DETECTION_HPP

#include <cstdint>
#include <optional>

// Closed-form energy-detector mathematics: Gaussian tail functions,
// false-alarm/detection probabilities with and without noise uncertainty,
// required sample counts, and the SNR-wall.

namespace bciwall {

// Gaussian tail probability P(Z > x) for standard normal Z.
double q_function(double x);

// Inverse of q_function on (0, 1). Rational initial estimate refined by two
// Newton steps against q_function itself; |q(q_inv(p)) - p| stays below 1e-10
// over p in [1e-8, 1 - 1e-8].
double q_inverse(double p);

double to_db(double x);
double from_db(double db);

struct DetectionTargets {
  double p_false_alarm = 0.1;
  double p_detection = 0.9;

  void validate() const;
};

struct NoiseUncertainty {
  double rho = 1.0;  // sqrt(sigma2_max / sigma2_min), >= 1

  void validate() const;
};

// Test statistic distribution tails under the Gaussian approximation.
// p_false_alarm:  Q((gamma - sigma_r2) / (sqrt(2/N) sigma_r2))
// p_detection:    Q((gamma - (t_c + sigma_r2)) / (sqrt(2/N) (t_c + sigma_r2)))
double p_false_alarm(double gamma, double sigma_r2, double n_samples);
double p_detection(double gamma, double t_c, double sigma_r2, double n_samples);

// Worst-case versions under noise uncertainty rho: the false alarm is
// evaluated at noise variance rho*sigma_r2, the detection at signal power on
// top of sigma_r2/rho.
double p_false_alarm_robust(double gamma, double sigma_r2, double n_samples, double rho);
double p_detection_robust(double gamma, double t_c, double sigma_r2, double n_samples,
                          double rho);

// Threshold meeting a false-alarm target at worst-case noise variance
// rho * sigma_r2 (rho = 1 recovers the stationary threshold).
double detection_threshold(double p_fa_target, double sigma_r2, double n_samples,
                           double rho = 1.0);

struct SampleCount {
  double raw = 0.0;          // real-valued N from the closed form
  std::uint64_t count = 0;   // ceil(raw)
  bool degenerate = false;   // both inverse-Q terms vanished (N = 0)
  bool approximation_suspect = false;  // count < 30: Gaussian approximation is shaky
};

// Stationary noise:
//   N = 2 [Qinv(P_FA) - Qinv(P_D) (1 + SNR)]^2 / SNR^2
SampleCount required_samples_stationary(const DetectionTargets& targets, double snr);

// Noise uncertainty rho, low-SNR form (SNR + 1 taken as 1):
//   N = 2 [Qinv(P_FA) - Qinv(P_D)]^2 / [SNR - (rho - 1/rho)]^2
// Returns nullopt ("undetectable", N -> infinity) when SNR <= rho - 1/rho.
std::optional<SampleCount> required_samples_robust(const DetectionTargets& targets,
                                                   double snr, double rho);

// Same elimination of gamma between the worst-case tail equations but without
// the low-SNR approximation:
//   N = 2 [rho Qinv(P_FA) - (SNR + 1/rho) Qinv(P_D)]^2 / [SNR - (rho - 1/rho)]^2
// Reduces exactly to the stationary count at rho = 1. This is the count that
// actually meets the targets when SNR is not small.
std::optional<SampleCount> required_samples_robust_exact(const DetectionTargets& targets,
                                                         double snr, double rho);

// SNR below which no sample count achieves the targets: rho - 1/rho.
double snr_wall(double rho);

// Linear SNR = T(c) / sigma_r^2.
double snr(double t_c, double sigma_r2);

struct DetectabilityVerdict {
  double snr_linear = 0.0;
  double snr_wall_linear = 0.0;
  bool detectable = false;
  double margin_db = 0.0;  // NaN unless both snr and wall are positive
};

// detectable iff snr > wall; equality counts as not detectable (the wall is
// defined by divergence of N).
DetectabilityVerdict decide_detectable(double snr_linear, double snr_wall_linear);

}  // namespace bciwall

#endif

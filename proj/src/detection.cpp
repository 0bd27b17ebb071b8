#include "bciwall/detection.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bciwall/errors.hpp"

namespace bciwall {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1 / sqrt(2 pi)

double gaussian_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Lower-tail standard normal quantile, Acklam's rational approximation
// (relative error below 1.2e-9 before refinement).
double probit_estimate(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double tail_probability(double gamma, double mean_power, double n_samples) {
  const double spread = std::sqrt(2.0 / n_samples) * mean_power;
  return q_function((gamma - mean_power) / spread);
}

SampleCount make_sample_count(double raw) {
  SampleCount out;
  out.raw = raw;
  out.count = static_cast<std::uint64_t>(std::ceil(raw));
  out.degenerate = (raw == 0.0);
  out.approximation_suspect = out.count < 30;
  return out;
}

void check_noise_power(double sigma_r2) {
  if (!(sigma_r2 > 0.0)) {
    throw ConfigError("noise power must be positive, got " + std::to_string(sigma_r2));
  }
}

void check_samples(double n_samples) {
  if (!(n_samples >= 1.0)) throw ConfigError("sample count must be >= 1");
}

}  // namespace

double q_function(double x) {
  if (!std::isfinite(x)) throw ConfigError("q_function: non-finite argument");
  return 0.5 * std::erfc(x / kSqrt2);
}

double q_inverse(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw ConfigError("q_inverse: probability must lie strictly inside (0, 1)");
  }
  if (p == 0.5) return 0.0;

  // Q(x) = p  <=>  Phi(x) = 1 - p
  double x = probit_estimate(1.0 - p);
  for (int i = 0; i < 2; ++i) {
    x += (q_function(x) - p) / gaussian_pdf(x);
  }
  return x;
}

double to_db(double x) {
  if (!(x > 0.0)) throw ConfigError("to_db: argument must be positive");
  return 10.0 * std::log10(x);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

void DetectionTargets::validate() const {
  if (!(p_false_alarm > 0.0) || !(p_false_alarm < 1.0) || !(p_detection > 0.0) ||
      !(p_detection < 1.0)) {
    throw ConfigError("detection targets must lie strictly inside (0, 1)");
  }
}

void NoiseUncertainty::validate() const {
  if (!(rho >= 1.0)) {
    throw ConfigError("noise uncertainty rho must be >= 1, got " + std::to_string(rho));
  }
}

double p_false_alarm(double gamma, double sigma_r2, double n_samples) {
  check_noise_power(sigma_r2);
  check_samples(n_samples);
  return tail_probability(gamma, sigma_r2, n_samples);
}

double p_detection(double gamma, double t_c, double sigma_r2, double n_samples) {
  check_noise_power(sigma_r2);
  check_samples(n_samples);
  if (!(t_c >= 0.0)) throw ConfigError("signal power must be non-negative");
  return tail_probability(gamma, t_c + sigma_r2, n_samples);
}

double p_false_alarm_robust(double gamma, double sigma_r2, double n_samples, double rho) {
  NoiseUncertainty{rho}.validate();
  check_noise_power(sigma_r2);
  check_samples(n_samples);
  return tail_probability(gamma, rho * sigma_r2, n_samples);
}

double p_detection_robust(double gamma, double t_c, double sigma_r2, double n_samples,
                          double rho) {
  NoiseUncertainty{rho}.validate();
  check_noise_power(sigma_r2);
  check_samples(n_samples);
  if (!(t_c >= 0.0)) throw ConfigError("signal power must be non-negative");
  return tail_probability(gamma, t_c + sigma_r2 / rho, n_samples);
}

double detection_threshold(double p_fa_target, double sigma_r2, double n_samples,
                           double rho) {
  NoiseUncertainty{rho}.validate();
  check_noise_power(sigma_r2);
  check_samples(n_samples);
  const double worst = rho * sigma_r2;
  return worst * (1.0 + std::sqrt(2.0 / n_samples) * q_inverse(p_fa_target));
}

SampleCount required_samples_stationary(const DetectionTargets& targets, double snr) {
  targets.validate();
  if (!(snr > 0.0)) throw ConfigError("required_samples_stationary: SNR must be positive");

  const double qfa = q_inverse(targets.p_false_alarm);
  const double qd = q_inverse(targets.p_detection);
  const double numerator = qfa - qd * (1.0 + snr);
  return make_sample_count(2.0 * numerator * numerator / (snr * snr));
}

std::optional<SampleCount> required_samples_robust(const DetectionTargets& targets,
                                                   double snr, double rho) {
  targets.validate();
  NoiseUncertainty{rho}.validate();
  if (!(snr > 0.0)) throw ConfigError("required_samples_robust: SNR must be positive");

  const double margin = snr - snr_wall(rho);
  if (margin <= 0.0) return std::nullopt;

  const double diff = q_inverse(targets.p_false_alarm) - q_inverse(targets.p_detection);
  return make_sample_count(2.0 * diff * diff / (margin * margin));
}

std::optional<SampleCount> required_samples_robust_exact(const DetectionTargets& targets,
                                                         double snr, double rho) {
  targets.validate();
  NoiseUncertainty{rho}.validate();
  if (!(snr > 0.0)) throw ConfigError("required_samples_robust_exact: SNR must be positive");

  const double margin = snr - snr_wall(rho);
  if (margin <= 0.0) return std::nullopt;

  const double numerator = rho * q_inverse(targets.p_false_alarm) -
                           (snr + 1.0 / rho) * q_inverse(targets.p_detection);
  return make_sample_count(2.0 * numerator * numerator / (margin * margin));
}

double snr_wall(double rho) {
  NoiseUncertainty{rho}.validate();
  return rho - 1.0 / rho;
}

double snr(double t_c, double sigma_r2) {
  check_noise_power(sigma_r2);
  if (!(t_c >= 0.0)) throw ConfigError("signal power must be non-negative");
  return t_c / sigma_r2;
}

DetectabilityVerdict decide_detectable(double snr_linear, double snr_wall_linear) {
  if (!std::isfinite(snr_linear) || !std::isfinite(snr_wall_linear)) {
    throw ConfigError("decide_detectable: non-finite inputs");
  }
  if (snr_wall_linear < 0.0) throw ConfigError("decide_detectable: negative SNR-wall");

  DetectabilityVerdict verdict;
  verdict.snr_linear = snr_linear;
  verdict.snr_wall_linear = snr_wall_linear;
  verdict.detectable = snr_linear > snr_wall_linear;
  verdict.margin_db = (snr_linear > 0.0 && snr_wall_linear > 0.0)
                          ? to_db(snr_linear) - to_db(snr_wall_linear)
                          : std::numeric_limits<double>::quiet_NaN();
  return verdict;
}

}  // namespace bciwall

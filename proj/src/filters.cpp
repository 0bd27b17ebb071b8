#include "bciwall/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bciwall/errors.hpp"

namespace bciwall {

namespace {

constexpr double kPi = std::numbers::pi;

double prewarp(double freq_hz, double fs) {
  return 2.0 * fs * std::tan(kPi * freq_hz / fs);
}

// Bilinear transform of one analog pole/zero: z = (2 fs + s) / (2 fs - s).
std::complex<double> bilinear(std::complex<double> s, double fs) {
  return (2.0 * fs + s) / (2.0 * fs - s);
}

std::complex<double> biquad_response(const BiquadCoeffs& c, std::complex<double> zinv) {
  const std::complex<double> zinv2 = zinv * zinv;
  return (c.b0 + c.b1 * zinv + c.b2 * zinv2) / (1.0 + c.a1 * zinv + c.a2 * zinv2);
}

// Biquad from a conjugate digital pole pair and two real digital zeros.
// Gain is fixed afterwards by the caller.
BiquadCoeffs section_from_roots(std::complex<double> pole, double zero0, double zero1) {
  BiquadCoeffs c;
  c.a1 = -2.0 * pole.real();
  c.a2 = std::norm(pole);
  c.b0 = 1.0;
  c.b1 = -(zero0 + zero1);
  c.b2 = zero0 * zero1;
  return c;
}

void normalize_gain_at(BiquadCoeffs& c, double freq_hz, double fs) {
  const std::complex<double> zinv = std::exp(std::complex<double>(0.0, -2.0 * kPi * freq_hz / fs));
  const double gain = std::abs(biquad_response(c, zinv));
  c.b0 /= gain;
  c.b1 /= gain;
  c.b2 /= gain;
}

void check_stable(const FilterChain& chain, const char* what) {
  for (const auto& stage : chain.stages) {
    if (stage.kind == StageKind::Biquad && !stage.coeffs.is_stable()) {
      throw ConfigError(std::string(what) + ": designed section is unstable");
    }
  }
}

struct BiquadState {
  double s1 = 0.0, s2 = 0.0;

  // Transposed direct form II.
  double step(const BiquadCoeffs& c, double x) {
    const double y = c.b0 * x + s1;
    s1 = c.b1 * x - c.a1 * y + s2;
    s2 = c.b2 * x - c.a2 * y;
    return y;
  }
};

}  // namespace

bool BiquadCoeffs::is_stable() const {
  if (!std::isfinite(b0) || !std::isfinite(b1) || !std::isfinite(b2) ||
      !std::isfinite(a1) || !std::isfinite(a2)) {
    return false;
  }
  return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

Scenario scenario_from_string(const std::string& tag) {
  if (tag == "A" || tag == "a") return Scenario::A;
  if (tag == "B" || tag == "b") return Scenario::B;
  if (tag == "C" || tag == "c") return Scenario::C;
  if (tag == "D" || tag == "d") return Scenario::D;
  throw ConfigError("unknown scenario tag '" + tag + "' (expected A, B, C or D)");
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
    case Scenario::D: return "D";
  }
  throw ConfigError("invalid scenario value");
}

bool FilterChain::has_stage(const std::string& label_prefix) const {
  return std::any_of(stages.begin(), stages.end(), [&](const FilterStage& s) {
    return s.label.rfind(label_prefix, 0) == 0;
  });
}

FilterChain design_butterworth_bandpass(double lo_hz, double hi_hz, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !(lo_hz > 0.0) || !(lo_hz < hi_hz) ||
      !(hi_hz < sample_rate_hz / 2.0)) {
    throw ConfigError("bandpass requires 0 < lo < hi < fs/2");
  }

  const double w1 = prewarp(lo_hz, sample_rate_hz);
  const double w2 = prewarp(hi_hz, sample_rate_hz);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  // Analog Butterworth prototype of order 2, then lowpass -> bandpass:
  // each prototype pole p maps to the two roots of s^2 - bw*p*s + w0^2 = 0.
  const std::complex<double> proto(-std::sqrt(0.5), std::sqrt(0.5));
  const std::complex<double> bp = bw * proto;
  const std::complex<double> disc = std::sqrt(bp * bp - 4.0 * w0 * w0);
  const std::array<std::complex<double>, 2> analog_poles = {(bp + disc) / 2.0,
                                                            (bp - disc) / 2.0};

  // The digital center frequency after warping back through the bilinear map.
  const double center_hz = std::atan(w0 / (2.0 * sample_rate_hz)) * sample_rate_hz / kPi;

  FilterChain chain;
  chain.sample_rate_hz = sample_rate_hz;
  std::ostringstream label;
  label << "butterworth_bandpass_" << lo_hz << "-" << hi_hz << "hz";
  for (const auto& pole : analog_poles) {
    // One zero at z=+1 and one at z=-1 per section keeps both sections
    // individually bandpass-shaped.
    BiquadCoeffs c = section_from_roots(bilinear(pole, sample_rate_hz), 1.0, -1.0);
    normalize_gain_at(c, center_hz, sample_rate_hz);
    chain.stages.push_back({StageKind::Biquad, c, label.str()});
  }
  check_stable(chain, "butterworth bandpass");
  return chain;
}

FilterChain design_dc_removal(double cutoff_hz, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw ConfigError("DC-removal highpass requires 0 < cutoff < fs/2");
  }

  const double wc = prewarp(cutoff_hz, sample_rate_hz);
  // Lowpass -> highpass: s -> wc / s on the order-2 prototype pole pair.
  const std::complex<double> proto(-std::sqrt(0.5), std::sqrt(0.5));
  const std::complex<double> pole = bilinear(wc / proto, sample_rate_hz);

  BiquadCoeffs c = section_from_roots(pole, 1.0, 1.0);  // double zero at DC
  normalize_gain_at(c, sample_rate_hz / 2.0, sample_rate_hz);

  FilterChain chain;
  chain.sample_rate_hz = sample_rate_hz;
  std::ostringstream label;
  label << "dc_removal_hp_" << cutoff_hz << "hz";
  chain.stages.push_back({StageKind::Biquad, c, label.str()});
  check_stable(chain, "DC removal");
  return chain;
}

FilterChain design_powerline_notch(double center_hz, double sample_rate_hz,
                                   double bandwidth_hz) {
  if (!(sample_rate_hz > 0.0) || !(center_hz > 0.0) || !(center_hz < sample_rate_hz / 2.0)) {
    throw ConfigError("notch requires 0 < center < fs/2");
  }
  if (!(bandwidth_hz > 0.0)) throw ConfigError("notch bandwidth must be positive");

  // Constrained notch (RBJ biquad): zeros exactly on the unit circle at the
  // center frequency, bandwidth set through Q = f0 / bw.
  const double w0 = 2.0 * kPi * center_hz / sample_rate_hz;
  const double q = center_hz / bandwidth_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;

  BiquadCoeffs c;
  c.b0 = 1.0 / a0;
  c.b1 = -2.0 * std::cos(w0) / a0;
  c.b2 = 1.0 / a0;
  c.a1 = -2.0 * std::cos(w0) / a0;
  c.a2 = (1.0 - alpha) / a0;

  FilterChain chain;
  chain.sample_rate_hz = sample_rate_hz;
  std::ostringstream label;
  label << "powerline_notch_" << center_hz << "hz";
  chain.stages.push_back({StageKind::Biquad, c, label.str()});
  check_stable(chain, "powerline notch");
  return chain;
}

std::vector<double> first_difference(std::span<const double> x) {
  if (x.empty()) throw DataError("first_difference: empty input");
  std::vector<double> y(x.size());
  double prev = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    y[n] = x[n] - prev;
    prev = x[n];
  }
  return y;
}

FilterChain scenario_chain(Scenario scenario, double sample_rate_hz,
                           const FilterSettings& settings) {
  FilterChain chain;
  chain.sample_rate_hz = sample_rate_hz;
  chain.scenario = scenario;

  auto append = [&chain](const FilterChain& part) {
    chain.stages.insert(chain.stages.end(), part.stages.begin(), part.stages.end());
  };

  switch (scenario) {
    case Scenario::A:
      break;
    case Scenario::B:
      chain.stages.push_back({StageKind::FirstDifference, {}, "first_difference"});
      break;
    case Scenario::C:
      append(design_butterworth_bandpass(8.0, 18.0, sample_rate_hz));
      break;
    case Scenario::D:
      append(design_butterworth_bandpass(8.0, 12.0, sample_rate_hz));
      break;
  }
  append(design_dc_removal(settings.dc_cutoff_hz, sample_rate_hz));
  append(design_powerline_notch(settings.notch_center_hz, sample_rate_hz,
                                settings.notch_bandwidth_hz));
  return chain;
}

std::vector<double> apply_chain(const FilterChain& chain, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  std::vector<BiquadState> states(chain.stages.size());

  for (std::size_t si = 0; si < chain.stages.size(); ++si) {
    const auto& stage = chain.stages[si];
    switch (stage.kind) {
      case StageKind::Biquad: {
        auto& state = states[si];
        for (double& v : y) v = state.step(stage.coeffs, v);
        break;
      }
      case StageKind::FirstDifference: {
        double prev = 0.0;
        for (double& v : y) {
          const double cur = v;
          v = cur - prev;
          prev = cur;
        }
        break;
      }
      case StageKind::PassThrough:
        break;
    }
  }
  return y;
}

Recording apply_chain(const FilterChain& chain, const Recording& rec) {
  if (rec.sample_rate_hz != chain.sample_rate_hz) {
    throw ConfigError("apply_chain: chain designed for " +
                      std::to_string(chain.sample_rate_hz) + " Hz, recording is " +
                      std::to_string(rec.sample_rate_hz) + " Hz");
  }
  Recording out = rec;
  out.samples = apply_chain(chain, std::span<const double>(rec.samples));
  return out;
}

std::complex<double> chain_response(const FilterChain& chain, double freq_hz) {
  std::complex<double> zinv;
  if (freq_hz == 0.0) {
    zinv = 1.0;
  } else if (freq_hz == chain.sample_rate_hz / 2.0) {
    zinv = -1.0;
  } else {
    zinv = std::exp(std::complex<double>(0.0, -2.0 * kPi * freq_hz / chain.sample_rate_hz));
  }

  std::complex<double> h = 1.0;
  for (const auto& stage : chain.stages) {
    switch (stage.kind) {
      case StageKind::Biquad:
        h *= biquad_response(stage.coeffs, zinv);
        break;
      case StageKind::FirstDifference:
        h *= 1.0 - zinv;
        break;
      case StageKind::PassThrough:
        break;
    }
  }
  return h;
}

std::string chain_description(const FilterChain& chain) {
  std::ostringstream out;
  if (chain.scenario) out << "scenario " << to_string(*chain.scenario) << ": ";
  for (std::size_t i = 0; i < chain.stages.size(); ++i) {
    if (i) out << " -> ";
    out << chain.stages[i].label;
  }
  return out.str();
}

void validate(const Recording& rec) {
  if (rec.samples.empty()) throw DataError("recording has no samples");
  if (!(rec.sample_rate_hz > 0.0)) throw ConfigError("recording sample rate must be positive");
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    if (!std::isfinite(rec.samples[i])) {
      throw DataError("recording contains a non-finite sample at index " + std::to_string(i));
    }
  }
}

}  // namespace bciwall

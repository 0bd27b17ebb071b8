#ifndef BCIWALL_TESTS_ORACLES_HPP
#define BCIWALL_TESTS_ORACLES_HPP

// Independent reference computations used by the tests. Everything here is
// deliberately brute force or quadrature based and shares no code with the
// library paths it checks.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace oracles {

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr double kGlNodes[5] = {0.1488743389816312, 0.4333953941292472,
                                       0.6794095682990244, 0.8650633666889845,
                                       0.9739065285171717};
inline constexpr double kGlWeights[5] = {0.2955242247147529, 0.2692667193099963,
                                         0.2190863625159820, 0.1494513491505806,
                                         0.0666713443086881};

template <typename F>
double integrate_panel(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    sum += kGlWeights[i] * (f(mid + half * kGlNodes[i]) + f(mid - half * kGlNodes[i]));
  }
  return half * sum;
}

// Composite Gauss-Legendre with fixed panel width.
template <typename F>
double integrate(F&& f, double a, double b, double panel = 0.25) {
  double total = 0.0;
  double x = a;
  while (x < b) {
    const double next = std::min(x + panel, b);
    total += integrate_panel(f, x, next);
    x = next;
  }
  return total;
}

// Gaussian tail P(Z > x) by quadrature of the density over [x, 9]; the
// remainder beyond 9 is below 1.2e-19.
inline double gauss_tail(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779;
  if (x >= 9.0) return 0.0;
  auto density = [](double t) { return inv_sqrt_2pi * std::exp(-0.5 * t * t); };
  return integrate(density, x, 9.0);
}

// Student-t tail P(T_dof > t) by quadrature of the density. The polynomial
// far tail is integrated exactly through the substitution u = 1/x, which
// turns it into a smooth integrand near zero.
inline double student_tail(double t, double dof) {
  const double log_norm = std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
                          0.5 * std::log(dof * std::numbers::pi);
  auto density = [&](double x) {
    return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(x * x / dof));
  };
  if (t < 0.0) return 1.0 - student_tail(-t, dof);
  const double split = std::max(t, 30.0);
  auto transformed = [&](double u) {  // density(1/u) / u^2
    return std::exp(log_norm + (dof - 1.0) * std::log(u) -
                    0.5 * (dof + 1.0) * std::log(u * u + 1.0 / dof));
  };
  return integrate(density, t, split, 0.5) + integrate(transformed, 0.0, 1.0 / split, 0.002);
}

// O(N*tau) window-by-window mean power.
inline std::vector<double> brute_window_power(std::span<const double> x, std::size_t tau) {
  std::vector<double> out;
  for (std::size_t p = 0; p + tau <= x.size(); ++p) {
    double sum = 0.0;
    for (std::size_t i = p; i < p + tau; ++i) sum += x[i] * x[i];
    out.push_back(sum / static_cast<double>(tau));
  }
  return out;
}

// Direct O(N^2) DFT for small inputs.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(m) / static_cast<double>(n);
      acc += x[m] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

// Steady-state amplitude of a filtered sinusoid, measured from the trailing
// portion of the response (amplitude = sqrt(2 * mean power) over whole
// periods of the tail).
template <typename Filter>
double steady_state_amplitude(Filter&& apply, double freq_hz, double fs,
                              double duration_s = 20.0) {
  const auto n = static_cast<std::size_t>(duration_s * fs);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs);
  }
  const std::vector<double> y = apply(x);

  // Tail covering an integer number of periods, at least 2 s after start.
  const auto periods = static_cast<std::size_t>(freq_hz * duration_s / 2.0);
  const auto tail = static_cast<std::size_t>(std::lround(
      static_cast<double>(periods) * fs / freq_hz));
  double sum = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) sum += y[i] * y[i];
  return std::sqrt(2.0 * sum / static_cast<double>(tail));
}

}  // namespace oracles

#endif

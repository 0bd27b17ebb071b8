#include "bciwall/kernels.hpp"

#include <algorithm>

#include "bciwall/errors.hpp"
#include "bciwall/rng.hpp"

namespace bciwall::kernels {

namespace {

// Window positions per streaming block. Small enough that the streamed
// update stays within ~1e-12 of a direct summation even for signals whose
// local power varies by several orders of magnitude.
constexpr std::size_t kBlock = 1024;

void check_window_args(std::size_t n, std::size_t tau) {
  if (tau < 2) throw ConfigError("sliding window: tau must be >= 2");
  if (tau > n) throw ConfigError("sliding window: tau exceeds signal length");
}

// One block of window positions [p0, p1): direct sum for the first window,
// add/subtract streaming for the rest.
void window_block(std::span<const double> x, std::size_t tau, std::size_t p0,
                  std::size_t p1, double* out) {
  long double acc = 0.0L;
  for (std::size_t i = p0; i < p0 + tau; ++i) acc += static_cast<long double>(x[i]) * x[i];
  out[p0] = static_cast<double>(acc / static_cast<long double>(tau));
  for (std::size_t p = p0 + 1; p < p1; ++p) {
    acc -= static_cast<long double>(x[p - 1]) * x[p - 1];
    acc += static_cast<long double>(x[p + tau - 1]) * x[p + tau - 1];
    out[p] = static_cast<double>(acc / static_cast<long double>(tau));
  }
}

double energy_trial(double variance, std::size_t window, std::uint64_t seed,
                    std::uint64_t stream) {
  GaussianStream gauss = gaussian_stream(seed, stream);
  double sum = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    const double z = gauss.next();
    sum += z * z;
  }
  return variance * sum / static_cast<double>(window);
}

}  // namespace

std::vector<double> sliding_mean_power(std::span<const double> x, std::size_t tau) {
  check_window_args(x.size(), tau);
  const std::size_t positions = x.size() - tau + 1;
  std::vector<double> out(positions);
  const std::int64_t blocks = static_cast<std::int64_t>((positions + kBlock - 1) / kBlock);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t p0 = static_cast<std::size_t>(b) * kBlock;
    const std::size_t p1 = std::min(p0 + kBlock, positions);
    window_block(x, tau, p0, p1, out.data());
  }
  return out;
}

std::vector<double> sliding_mean_power_serial(std::span<const double> x, std::size_t tau) {
  check_window_args(x.size(), tau);
  const std::size_t positions = x.size() - tau + 1;
  std::vector<double> out(positions);
  for (std::size_t p0 = 0; p0 < positions; p0 += kBlock) {
    window_block(x, tau, p0, std::min(p0 + kBlock, positions), out.data());
  }
  return out;
}

std::uint64_t count_energy_exceedances(double variance, std::size_t window,
                                       std::uint64_t trials, double gamma,
                                       std::uint64_t seed, std::uint64_t stream_offset) {
  std::uint64_t count = 0;
  const std::int64_t n = static_cast<std::int64_t>(trials);

#pragma omp parallel for schedule(static) reduction(+ : count)
  for (std::int64_t t = 0; t < n; ++t) {
    const double stat =
        energy_trial(variance, window, seed, stream_offset + static_cast<std::uint64_t>(t));
    if (stat > gamma) ++count;
  }
  return count;
}

std::uint64_t count_energy_exceedances_serial(double variance, std::size_t window,
                                              std::uint64_t trials, double gamma,
                                              std::uint64_t seed,
                                              std::uint64_t stream_offset) {
  std::uint64_t count = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (energy_trial(variance, window, seed, stream_offset + t) > gamma) ++count;
  }
  return count;
}

std::vector<double> energy_statistics(double variance, std::size_t window,
                                      std::uint64_t trials, std::uint64_t seed,
                                      std::uint64_t stream_offset) {
  std::vector<double> stats(trials);
  const std::int64_t n = static_cast<std::int64_t>(trials);

#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n; ++t) {
    stats[static_cast<std::size_t>(t)] =
        energy_trial(variance, window, seed, stream_offset + static_cast<std::uint64_t>(t));
  }
  return stats;
}

std::vector<double> energy_statistics_serial(double variance, std::size_t window,
                                             std::uint64_t trials, std::uint64_t seed,
                                             std::uint64_t stream_offset) {
  std::vector<double> stats(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    stats[t] = energy_trial(variance, window, seed, stream_offset + t);
  }
  return stats;
}

}  // namespace bciwall::kernels

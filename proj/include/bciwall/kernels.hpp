#ifndef BCIWALL_KERNELS_HPP
#define BCIWALL_KERNELS_HPP

#include <cstdint>
#include <span>
#include <vector>

// Hot inner loops. Each kernel comes in an OpenMP flavour and a serial
// reference flavour with identical arithmetic; the serial versions are kept
// for testing and benchmarking, and the two must agree bit for bit.

namespace bciwall::kernels {

// Mean power over every length-tau window: out[p] = (1/tau) sum x[p..p+tau)^2.
// Windows are processed in fixed-size blocks; each block starts from a direct
// summation and streams within the block on a long double accumulator, which
// bounds the drift independently of the signal length.
std::vector<double> sliding_mean_power(std::span<const double> x, std::size_t tau);
std::vector<double> sliding_mean_power_serial(std::span<const double> x, std::size_t tau);

// Energy-detector Monte Carlo: for trials t = 0..trials-1, draw `window`
// i.i.d. N(0, variance) samples from the stream (seed, stream_offset + t),
// form the mean power, and count how often it exceeds gamma.
std::uint64_t count_energy_exceedances(double variance, std::size_t window,
                                       std::uint64_t trials, double gamma,
                                       std::uint64_t seed, std::uint64_t stream_offset);
std::uint64_t count_energy_exceedances_serial(double variance, std::size_t window,
                                              std::uint64_t trials, double gamma,
                                              std::uint64_t seed,
                                              std::uint64_t stream_offset);

// Same trial layout, but returns the per-trial mean-power statistics
// (trial t at index t) for threshold sweeps.
std::vector<double> energy_statistics(double variance, std::size_t window,
                                      std::uint64_t trials, std::uint64_t seed,
                                      std::uint64_t stream_offset);
std::vector<double> energy_statistics_serial(double variance, std::size_t window,
                                             std::uint64_t trials, std::uint64_t seed,
                                             std::uint64_t stream_offset);

}  // namespace bciwall::kernels

#endif

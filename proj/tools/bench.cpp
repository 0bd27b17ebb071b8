// Serial-vs-OpenMP benchmark for the hot kernels. The parallel flavours must
// reproduce the serial results exactly; this binary measures the speedup and
// double-checks that equality on real workloads.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "bciwall/kernels.hpp"
#include "bciwall/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
double time_best_of(int repeats, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    fn();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  return diff;
}

void report(const char* name, double serial_s, double parallel_s, const char* agreement) {
  std::printf("%-28s serial %8.4f s   openmp %8.4f s   speedup %5.2fx   %s\n", name, serial_s,
              parallel_s, serial_s / parallel_s, agreement);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel benchmark: serial reference vs OpenMP"};
  std::size_t signal_len = 2'000'000;
  std::size_t tau = 250;
  std::uint64_t trials = 20000;
  std::size_t window = 512;
  int repeats = 3;
  app.add_option("--signal-length", signal_len, "samples for the sliding-window benchmark");
  app.add_option("--tau", tau, "window length in samples");
  app.add_option("--trials", trials, "Monte Carlo trials");
  app.add_option("--window", window, "Monte Carlo window length");
  app.add_option("--repeats", repeats, "best-of repeats per measurement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; both columns run serially\n");
#endif

  using namespace bciwall;

  // sliding-window mean power
  std::vector<double> signal(signal_len);
  GaussianStream noise = gaussian_stream(42, 0);
  for (auto& v : signal) v = 10.0 * noise.next();

  std::vector<double> serial_out, parallel_out;
  const double t_sw_serial = time_best_of(
      repeats, [&] { serial_out = kernels::sliding_mean_power_serial(signal, tau); });
  const double t_sw_parallel =
      time_best_of(repeats, [&] { parallel_out = kernels::sliding_mean_power(signal, tau); });
  const double sw_diff = max_abs_diff(serial_out, parallel_out);
  report("sliding_mean_power", t_sw_serial, t_sw_parallel,
         sw_diff == 0.0 ? "bit-exact" : "MISMATCH");

  // Monte Carlo exceedance counting
  std::uint64_t serial_count = 0, parallel_count = 0;
  const double t_mc_serial = time_best_of(repeats, [&] {
    serial_count = kernels::count_energy_exceedances_serial(1.0, window, trials, 1.05, 7, 0);
  });
  const double t_mc_parallel = time_best_of(repeats, [&] {
    parallel_count = kernels::count_energy_exceedances(1.0, window, trials, 1.05, 7, 0);
  });
  report("count_energy_exceedances", t_mc_serial, t_mc_parallel,
         serial_count == parallel_count ? "bit-exact" : "MISMATCH");

  // per-trial statistics for ROC sweeps
  std::vector<double> serial_stats, parallel_stats;
  const double t_st_serial = time_best_of(repeats, [&] {
    serial_stats = kernels::energy_statistics_serial(1.0, window, trials, 7, 0);
  });
  const double t_st_parallel = time_best_of(
      repeats, [&] { parallel_stats = kernels::energy_statistics(1.0, window, trials, 7, 0); });
  report("energy_statistics", t_st_serial, t_st_parallel,
         max_abs_diff(serial_stats, parallel_stats) == 0.0 ? "bit-exact" : "MISMATCH");

  const bool ok = sw_diff == 0.0 && serial_count == parallel_count &&
                  max_abs_diff(serial_stats, parallel_stats) == 0.0;
  if (!ok) {
    std::printf("serial/parallel disagreement detected\n");
    return 1;
  }
  return 0;
}

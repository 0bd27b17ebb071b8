#include <cmath>
#include <numbers>

#include <doctest.h>

#include "bciwall/detection.hpp"
#include "bciwall/errors.hpp"
#include "bciwall/estimation.hpp"
#include "bciwall/kernels.hpp"
#include "bciwall/simulation.hpp"

using namespace bciwall;

namespace {

VarianceProfile two_segments(std::size_t half, double s2a, double s2b) {
  VarianceProfile profile;
  profile.segments = {{0, half, s2a}, {half, 2 * half, s2b}};
  return profile;
}

}  // namespace

TEST_CASE("generate_piecewise_gaussian") {
  SUBCASE("zero variance everywhere gives the zero signal") {
    VarianceProfile profile;
    profile.segments = {{0, 1000, 0.0}};
    for (double v : generate_piecewise_gaussian(profile, 1000, 4)) CHECK(v == 0.0);
  }
  SUBCASE("law of large numbers on one segment") {
    VarianceProfile profile;
    profile.segments = {{0, 1000000, 1.0}};
    const auto x = generate_piecewise_gaussian(profile, 1000000, 4);
    CHECK(mean_power(x) == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("two segments recover rho = 2 through the noise profile") {
    // tau long enough that the variance-estimate fluctuation (sd ~ sqrt(2/tau))
    // stays inside the 5% band
    const auto x = generate_piecewise_gaussian(two_segments(200000, 1.0, 4.0), 400000, 4);
    const NoiseProfile p = noise_profile(x, 20000);
    CHECK(p.rho == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("seeds reproduce bit for bit") {
    const auto a = generate_piecewise_gaussian(two_segments(500, 1.0, 4.0), 1000, 9);
    const auto b = generate_piecewise_gaussian(two_segments(500, 1.0, 4.0), 1000, 9);
    const auto c = generate_piecewise_gaussian(two_segments(500, 1.0, 4.0), 1000, 10);
    CHECK(a == b);
    CHECK(a != c);
  }
  SUBCASE("invalid profiles") {
    VarianceProfile negative;
    negative.segments = {{0, 10, -1.0}};
    CHECK_THROWS_AS(generate_piecewise_gaussian(negative, 10, 1), ConfigError);
    VarianceProfile gap;
    gap.segments = {{0, 5, 1.0}, {6, 10, 1.0}};
    CHECK_THROWS_AS(generate_piecewise_gaussian(gap, 10, 1), ConfigError);
    VarianceProfile short_profile;
    short_profile.segments = {{0, 5, 1.0}};
    CHECK_THROWS_AS(generate_piecewise_gaussian(short_profile, 10, 1), ConfigError);
  }
}

TEST_CASE("embed_conscious_signal") {
  VarianceProfile profile;
  profile.segments = {{0, 1000, 1.0}};
  const auto noise = generate_piecewise_gaussian(profile, 1000, 12);

  SUBCASE("zero amplitude leaves the noise untouched") {
    const auto comp =
        embed_conscious_signal(noise, SinusoidSignal{10.0, 0.0}, {0, 0}, 250.0);
    CHECK(comp.composed == noise);
    CHECK(comp.background == noise);
  }
  SUBCASE("sinusoid of amplitude sqrt(2) has unit power") {
    const auto comp = embed_conscious_signal(std::vector<double>(1000, 0.0),
                                             SinusoidSignal{10.0, std::numbers::sqrt2},
                                             {0, 0}, 250.0);
    CHECK(mean_power(comp.composed) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("noiseless p300 template reproduces its peak power") {
    const auto comp = embed_conscious_signal(std::vector<double>(1000, 0.0),
                                             P300Template{5.0, 0.3, 0.2}, {0, 0}, 250.0);
    EvokedPotential ep;
    ep.samples = comp.composed;
    ep.pre_stimulus_samples = 0;
    ep.trial_count = 1;
    ep.sample_rate_hz = 250.0;
    const auto est = peak_signal_power(ep, {250.0, 500.0}, 0.4, 200.0);
    CHECK(est.t_time == doctest::Approx(25.0).epsilon(1e-6));
  }
  SUBCASE("composition is the exact sum") {
    const auto comp =
        embed_conscious_signal(noise, SinusoidSignal{10.0, 2.0}, {100, 500}, 250.0);
    for (std::size_t i = 0; i < comp.composed.size(); ++i) {
      CHECK(comp.composed[i] == comp.artefact[i] + comp.background[i] + comp.conscious[i]);
    }
  }
  SUBCASE("placement past the end is rejected") {
    CHECK_THROWS_AS(
        embed_conscious_signal(noise, SinusoidSignal{10.0, 1.0}, {900, 200}, 250.0),
        ConfigError);
  }
}

TEST_CASE("simulate_detector: threshold extremes") {
  const EmpiricalRates all = simulate_detector(HypothesisCase::null_case(), 0.0, 16, 2000,
                                               1.0, 3);
  CHECK(all.false_alarm_rate == 1.0);  // mean power is nonnegative
  const EmpiricalRates none = simulate_detector(HypothesisCase::null_case(), 1e12, 16, 2000,
                                                1.0, 3);
  CHECK(none.false_alarm_rate == 0.0);
  CHECK(std::isnan(none.detection_rate));
}

TEST_CASE("simulate_detector reproduces the analytic false-alarm rate") {
  const EmpiricalRates rates = simulate_detector(HypothesisCase::null_case(), 1.2, 200,
                                                 100000, 1.0, 7);
  CHECK(rates.false_alarm_rate == doctest::Approx(0.0228).epsilon(0.25));
  CHECK(std::abs(rates.false_alarm_rate - 0.02275) < 0.005);
  CHECK(rates.std_error < std::sqrt(0.25 / 100000.0) + 1e-12);
}

TEST_CASE("empirical rates match the Gaussian-approximation tails within 0.02") {
  // gamma placed at z in {1, Qinv(0.1), 2}, where the chi-square skew leaves
  // the Gaussian approximation within +/-0.01 even at N = 32
  std::uint64_t stream = 100;
  for (double sigma2 : {1.0, 4.0}) {
    for (std::size_t window : {32ul, 256ul}) {
      for (double z : {1.0, 1.2815515655, 2.0}) {
        const double n = static_cast<double>(window);
        const double gamma = sigma2 * (1.0 + std::sqrt(2.0 / n) * z);
        const EmpiricalRates h0 = simulate_detector(HypothesisCase::null_case(), gamma,
                                                    window, 100000, sigma2, 50 + stream);
        CHECK(std::abs(h0.false_alarm_rate - p_false_alarm(gamma, sigma2, n)) < 0.02);

        const double t_c = sigma2;  // SNR 0 dB
        const EmpiricalRates h1 = simulate_detector(HypothesisCase::signal_case(t_c), gamma,
                                                    window, 100000, sigma2, 51 + stream);
        CHECK(std::abs(h1.detection_rate - p_detection(gamma, t_c, sigma2, n)) < 0.02);
        stream += 2;
      }
    }
  }
}

TEST_CASE("simulate_detector: identical seeds, identical rates; serial == parallel") {
  const EmpiricalRates a =
      simulate_detector(HypothesisCase::signal_case(1.0), 1.4, 64, 20000, 1.0, 42);
  const EmpiricalRates b =
      simulate_detector(HypothesisCase::signal_case(1.0), 1.4, 64, 20000, 1.0, 42);
  CHECK(a.detection_rate == b.detection_rate);

  const std::uint64_t serial =
      kernels::count_energy_exceedances_serial(2.0, 64, 20000, 1.4, 42, 0);
  const std::uint64_t parallel = kernels::count_energy_exceedances(2.0, 64, 20000, 1.4, 42, 0);
  CHECK(serial == parallel);

  const auto stats_serial = kernels::energy_statistics_serial(2.0, 64, 5000, 42, 0);
  const auto stats_parallel = kernels::energy_statistics(2.0, 64, 5000, 42, 0);
  CHECK(stats_serial == stats_parallel);
}

TEST_CASE("simulate_detector parameter validation") {
  CHECK_THROWS_AS(simulate_detector(HypothesisCase::null_case(), 1.0, 0, 100, 1.0, 1),
                  ConfigError);
  CHECK_THROWS_AS(simulate_detector(HypothesisCase::null_case(), 1.0, 16, 100, 0.0, 1),
                  ConfigError);
  CHECK_THROWS_AS(simulate_detector(HypothesisCase{Hypothesis::H0, 1.0}, 1.0, 16, 100, 1.0, 1),
                  ConfigError);
}

TEST_CASE("stationary sample count meets its targets empirically") {
  const DetectionTargets targets{0.1, 0.9};
  const SampleCount n = required_samples_stationary(targets, 1.0);  // 30
  const double gamma = detection_threshold(0.1, 1.0, static_cast<double>(n.count));
  const EmpiricalRates h0 =
      simulate_detector(HypothesisCase::null_case(), gamma, n.count, 100000, 1.0, 1001);
  const EmpiricalRates h1 =
      simulate_detector(HypothesisCase::signal_case(1.0), gamma, n.count, 100000, 1.0, 1002);
  CHECK(h0.false_alarm_rate <= 0.12);
  CHECK(h1.detection_rate >= 0.88);
}

TEST_CASE("worst_case_separation") {
  const double rho = 1.7;
  const double wall = snr_wall(rho);
  SUBCASE("on the wall the worst-case means coincide") {
    const SeparationReport r = worst_case_separation(wall, rho, 1.3, 100);
    CHECK(r.h0_worst_mean == doctest::Approx(r.h1_worst_mean).epsilon(1e-12));
    CHECK(!r.separated);
  }
  SUBCASE("above the wall H1 leads") {
    CHECK(worst_case_separation(2.0 * wall, rho, 1.3, 100).separated);
    CHECK(worst_case_separation(2.0 * snr_wall(3.0), 3.0, 0.7, 100).separated);
  }
  SUBCASE("below the wall H1 trails, any window") {
    for (std::size_t window : {10ul, 100000ul}) {
      CHECK(!worst_case_separation(0.5 * wall, rho, 1.3, window).separated);
    }
  }
}

TEST_CASE("worst-case ROC stays below the targets under the wall") {
  const double rho = 2.0;
  const double wall = snr_wall(rho);
  const auto roc = worst_case_roc(0.5 * wall, rho, 1.0, 1000, 2000, 200, 77);
  REQUIRE(roc.size() == 200);
  for (const auto& point : roc) {
    const bool meets = point.p_false_alarm <= 0.1 && point.p_detection >= 0.9;
    CHECK(!meets);
    // worst-case pair flips the ROC below the diagonal wherever rates are interior
    if (point.p_false_alarm > 0.01 && point.p_false_alarm < 0.99) {
      CHECK(point.p_detection <= point.p_false_alarm + 0.05);
    }
  }
}

TEST_CASE("above the wall the exact robust count meets the targets") {
  const double rho = 2.0;
  const double snr_above = 2.0 * snr_wall(rho);  // 3.0
  const auto n = required_samples_robust_exact({0.1, 0.9}, snr_above, rho);
  REQUIRE(n.has_value());
  const double gamma = detection_threshold(0.1, 1.0, static_cast<double>(n->count), rho);
  const RatePair rates = simulate_rate_pair(snr_above, gamma, n->count, 50000, 1.0, 1234, rho);
  CHECK(rates.false_alarm_rate <= 0.12);
  CHECK(rates.detection_rate >= 0.88);
}

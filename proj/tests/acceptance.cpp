// Acceptance suite: every criterion pinned, one PASS/FAIL line each.
// Returns nonzero if any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bciwall/chart.hpp"
#include "bciwall/detection.hpp"
#include "bciwall/errors.hpp"
#include "bciwall/estimation.hpp"
#include "bciwall/filters.hpp"
#include "bciwall/io.hpp"
#include "bciwall/pipeline.hpp"
#include "bciwall/simulation.hpp"
#include "bciwall/synthetic_dataset.hpp"
#include "support/oracles.hpp"

using namespace bciwall;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s  criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  if (!pass) ++g_failures;
}

template <typename F>
void criterion(int id, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    body(id);
  } catch (const std::exception& err) {
    report(id, false, std::string("exception: ") + err.what());
  }
  const double elapsed = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - start).count();
  std::printf("      (criterion %d took %.2f s)\n", id, elapsed);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// 1. Special functions: q / q_inverse round trip below 1e-10 on 1000 points,
//    q matches a quadrature oracle to 1e-10 on [-8, 8].
void criterion_1(int id) {
  double worst_round_trip = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double p = 1e-8 + (1.0 - 2e-8) * static_cast<double>(i) / 1000.0;
    worst_round_trip = std::max(worst_round_trip, std::abs(q_function(q_inverse(p)) - p));
  }
  double worst_oracle = 0.0;
  for (double x = -8.0; x <= 8.0 + 1e-12; x += 0.01) {
    worst_oracle = std::max(worst_oracle, std::abs(q_function(x) - oracles::gauss_tail(x)));
  }
  report(id, worst_round_trip < 1e-10 && worst_oracle < 1e-10,
         fmt("q/q_inverse round trip max err %.2e (< 1e-10), quadrature match max err %.2e "
             "(< 1e-10)",
             worst_round_trip, worst_oracle));
}

// 2. Stationary detection: N from the closed form is 30; the analytic
//    threshold meets the targets within +/-0.02 at 1e5 Monte Carlo trials.
void criterion_2(int id) {
  const DetectionTargets targets{0.1, 0.9};
  const SampleCount n = required_samples_stationary(targets, 1.0);
  const double gamma = detection_threshold(0.1, 1.0, static_cast<double>(n.count));
  const EmpiricalRates h0 =
      simulate_detector(HypothesisCase::null_case(), gamma, n.count, 100000, 1.0, 2001);
  const EmpiricalRates h1 =
      simulate_detector(HypothesisCase::signal_case(1.0), gamma, n.count, 100000, 1.0, 2002);
  const bool pass =
      n.count == 30 && h0.false_alarm_rate <= 0.12 && h1.detection_rate >= 0.88;
  report(id, pass,
         fmt("N = %llu (expect 30), empirical P_FA %.4f (<= 0.12), P_D %.4f (>= 0.88)",
             static_cast<unsigned long long>(n.count), h0.false_alarm_rate,
             h1.detection_rate));
}

// 3. SNR-wall closed form: exact anchors, undetectable at/below the wall,
//    monotone divergence, N(margin 1.01x wall) > 1e6 for rho = 1.05.
void criterion_3(int id) {
  bool pass = snr_wall(1.0) == 0.0 && snr_wall(2.0) == 1.5;
  std::string note = fmt("wall(1) = %g, wall(2) = %g", snr_wall(1.0), snr_wall(2.0));

  const DetectionTargets targets{0.1, 0.9};
  const double rho = 1.05;
  const double wall = snr_wall(rho);
  pass = pass && !required_samples_robust(targets, wall, rho).has_value();
  pass = pass && !required_samples_robust(targets, 0.5 * wall, rho).has_value();

  double prev = 0.0;
  double margin = 0.64;
  for (int step = 0; step < 10; ++step) {
    const auto n = required_samples_robust(targets, wall * (1.0 + margin), rho);
    if (!n || n->raw <= prev || (step > 0 && n->raw < 2.0 * prev)) pass = false;
    prev = n ? n->raw : 0.0;
    margin /= 2.0;
  }

  const auto near_wall = required_samples_robust(targets, 1.01 * wall, rho);
  pass = pass && near_wall.has_value() && near_wall->raw > 1e6;
  note += fmt(", N at 1.01x wall = %.3g (> 1e6), divergence monotone",
              near_wall ? near_wall->raw : -1.0);
  report(id, pass, note);
}

// 4. Operational wall by worst-case Monte Carlo: below the wall no operating
//    point on a 200-gamma sweep reaches the targets at N in {1e3, 1e5}; at
//    SNR = 2x wall the exact analytic N meets both within +/-0.02.
void criterion_4(int id) {
  const double rho = 2.0;
  const double wall = snr_wall(rho);  // 1.5
  bool pass = true;
  std::string note;

  const std::uint64_t trials_small = 4000, trials_large = 2000;
  for (const auto& [window, trials] :
       std::vector<std::pair<std::size_t, std::uint64_t>>{{1000, trials_small},
                                                          {100000, trials_large}}) {
    const auto roc = worst_case_roc(0.5 * wall, rho, 1.0, window, trials, 200, 4001);
    double best_pd = 0.0;
    for (const auto& point : roc) {
      if (point.p_false_alarm <= 0.1) best_pd = std::max(best_pd, point.p_detection);
    }
    if (best_pd >= 0.9) pass = false;
    note += fmt("N=%zu: best P_D at P_FA<=0.1 is %.3f; ", window, best_pd);
  }

  const DetectionTargets targets{0.1, 0.9};
  const auto n = required_samples_robust_exact(targets, 2.0 * wall, rho);
  const double gamma = detection_threshold(0.1, 1.0, static_cast<double>(n->count), rho);
  const RatePair rates =
      simulate_rate_pair(2.0 * wall, gamma, n->count, 100000, 1.0, 4002, rho);
  pass = pass && rates.false_alarm_rate <= 0.12 && rates.detection_rate >= 0.88;
  note += fmt("SNR=2x wall: N=%llu -> P_FA %.4f (<= 0.12), P_D %.4f (>= 0.88)",
              static_cast<unsigned long long>(n->count), rates.false_alarm_rate,
              rates.detection_rate);
  report(id, pass, note);
}

// 5. Filters: scenario D response anchors and the first-difference impulse.
void criterion_5(int id) {
  const FilterChain chain = scenario_chain(Scenario::D, 250.0);
  const double at_10 = 20.0 * std::log10(std::abs(chain_response(chain, 10.0)));
  const double at_50 = 20.0 * std::log10(std::abs(chain_response(chain, 50.0)));
  const bool zeros = std::abs(chain_response(chain, 0.0)) == 0.0 &&
                     std::abs(chain_response(chain, 125.0)) == 0.0;
  const std::vector<double> impulse = first_difference(std::vector<double>{1.0, 0.0});
  const bool diff_ok = impulse == std::vector<double>{1.0, -1.0};
  const bool pass = std::abs(at_10) < 1.0 && at_50 <= -40.0 && zeros && diff_ok;
  report(id, pass,
         fmt("|H(10 Hz)| = %.3f dB (within 1), |H(50 Hz)| = %.1f dB (<= -40), exact "
             "DC/Nyquist zeros: %s, first_difference impulse [1,-1]: %s",
             at_10, at_50, zeros ? "yes" : "no", diff_ok ? "yes" : "no"));
}

// 6. End-to-end two-level fixture: sigma^2 in {1, 4} with 2:1 durations gives
//    rho = 2, wall = 1.76 dB; an embedded reference at 4x the nominal variance
//    gives SNR = 6.02 dB; both within 0.5 dB through the full pipeline.
void criterion_6(int id) {
  Recording rec;
  rec.sample_rate_hz = 250.0;
  rec.subject = "fixture";
  rec.task = "two-level";
  rec.samples.reserve(15000);
  for (std::size_t i = 0; i < 10000; ++i) rec.samples.push_back(i % 2 ? -1.0 : 1.0);
  for (std::size_t i = 0; i < 5000; ++i) rec.samples.push_back(i % 2 ? -2.0 : 2.0);

  EvokedPotential ep;
  ep.sample_rate_hz = 250.0;
  ep.pre_stimulus_samples = 50;
  ep.samples.assign(250, 0.0);
  ep.trial_count = 40;
  // 10 Hz burst with peak sqrt(8), so T(c) = 8 = 4 * sigma2_nominal; a
  // carrier burst carries no DC and survives the causal highpass intact
  const double peak = std::sqrt(8.0);
  for (std::size_t i = 0; i < ep.samples.size(); ++i) {
    const double t = (static_cast<double>(i) - 50.0) / 250.0;
    if (t >= 0.2 && t <= 0.4) {
      const double envelope = 0.5 * (1.0 + std::cos(std::numbers::pi * (t - 0.3) / 0.1));
      ep.samples[i] = peak * envelope * std::cos(2.0 * std::numbers::pi * 10.0 * (t - 0.3));
    }
  }

  const AnalysisResult r = analyze_recording(rec, ep, Scenario::A, {});
  const bool pass = std::abs(r.snr_db - 6.02) <= 0.5 && std::abs(r.wall_db - 1.76) <= 0.5 &&
                    r.detectable;
  report(id, pass,
         fmt("SNR %.2f dB (6.02 +/- 0.5), wall %.2f dB (1.76 +/- 0.5), detectable %s",
             r.snr_db, r.wall_db, r.detectable ? "yes" : "no"));
}

// 7. Statistics: t tail anchor and the paired one-sided t-test example.
void criterion_7(int id) {
  const double tail = t_tail(1.7396, 17);
  const double oracle = oracles::student_tail(1.7396, 17);
  std::vector<AnalysisResult> results;
  for (double diff : {1.0, 2.0, 0.5, 1.5}) {
    AnalysisResult r;
    r.wall_db = 0.0;
    r.snr_db = diff;
    results.push_back(r);
  }
  const TaskSummary summary = summarize_task("t", Scenario::A, results, 0.05);
  const bool pass = std::abs(tail - 0.05) <= 5e-4 && std::abs(tail - oracle) <= 1e-6 &&
                    std::abs(summary.t_statistic - 3.873) <= 0.001 &&
                    std::abs(summary.p_value - 0.0152) <= 0.001;
  report(id, pass,
         fmt("t_tail(1.7396, 17) = %.6f (0.0500 +/- 5e-4, oracle %.6f), paired t = %.4f "
             "(3.873 +/- 0.001), p = %.5f (0.0152 +/- 0.001)",
             tail, oracle, summary.t_statistic, summary.p_value));
}

// 8. Six-subject synthetic fixture through the manifest-driven study path:
//    scenario A fails and scenario D passes for every subject. Claims about
//    real recordings need the real dataset; this fixture is the CI stand-in
//    and the study command covers the full dataset.
void criterion_8(int id) {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("bciwall-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  SyntheticCohortConfig config;  // 6 subjects, 2 tasks
  write_synthetic_cohort(config, dir / "data");

  RunConfig run_config = parse_run_config(
      "{\"scenarios\": [\"A\", \"D\"], \"peak_window_ms\": [200, 650]}");
  const DatasetManifest manifest = load_manifest(dir / "data" / "manifest.json");
  const Dataset dataset = load_dataset(manifest);
  const StudyResult study =
      run_study(dataset, run_config.scenarios, run_config.analysis, run_config.alpha);

  std::size_t a_total = 0, a_fail = 0, d_total = 0, d_pass = 0;
  for (const auto& r : study.all_results) {
    if (r.scenario == Scenario::A) {
      ++a_total;
      if (!r.detectable) ++a_fail;
    } else if (r.scenario == Scenario::D) {
      ++d_total;
      if (r.detectable) ++d_pass;
    }
  }
  bool summaries_ok = true;
  for (const auto& s : study.summaries) {
    if (s.scenario == Scenario::A && s.significant) summaries_ok = false;
    if (s.scenario == Scenario::D && !s.significant) summaries_ok = false;
  }

  write_results_csv(study.all_results, dir / "results.csv");
  write_summaries_csv(study.summaries, dir / "summaries.csv");
  write_run_json(run_config, study, 250.0, dir / "run.json");
  render_chart(study.summaries, dir / "chart.svg");
  const bool artifacts = fs::exists(dir / "results.csv") && fs::exists(dir / "chart.svg");

  const bool pass = a_total == 12 && a_fail == a_total && d_total == 12 &&
                    d_pass == d_total && summaries_ok && study.exclusions.empty() &&
                    artifacts;
  report(id, pass,
         fmt("scenario A fails %zu/%zu recordings, scenario D passes %zu/%zu, t-tests "
             "split accordingly: %s, study artifacts written: %s",
             a_fail, a_total, d_pass, d_total, summaries_ok ? "yes" : "no",
             artifacts ? "yes" : "no"));

  std::error_code ec;
  fs::remove_all(dir, ec);
}

}  // namespace

int main() {
  criterion(1, criterion_1);
  criterion(2, criterion_2);
  criterion(3, criterion_3);
  criterion(4, criterion_4);
  criterion(5, criterion_5);
  criterion(6, criterion_6);
  criterion(7, criterion_7);
  criterion(8, criterion_8);

  std::printf("%s (%d criterion(s) failed)\n", g_failures == 0 ? "ALL PASS" : "FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}

#include "bciwall/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "bciwall/detection.hpp"
#include "bciwall/errors.hpp"

namespace bciwall {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr int max_iter = 300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

std::string cell_label(const std::string& subject, const std::string& task,
                       Scenario scenario) {
  return "subject " + subject + ", task " + task + ", scenario " + to_string(scenario);
}

}  // namespace

std::string to_string(DomainMode mode) {
  return mode == DomainMode::Time ? "time" : "frequency";
}

DomainMode domain_mode_from_string(const std::string& name) {
  if (name == "time") return DomainMode::Time;
  if (name == "frequency") return DomainMode::Frequency;
  throw ConfigError("unknown domain mode '" + name + "' (expected time or frequency)");
}

DomainMode default_domain_mode(Scenario scenario) {
  return (scenario == Scenario::C || scenario == Scenario::D) ? DomainMode::Frequency
                                                              : DomainMode::Time;
}

void AnalysisConfig::validate() const {
  if (!(tau_seconds > 0.0)) throw ConfigError("tau must be positive");
  if (!(reduction_fraction >= 0.0) || !(reduction_fraction < 1.0)) {
    throw ConfigError("reduction fraction must lie in [0, 1)");
  }
  if (!(discard_start_s >= 0.0)) throw ConfigError("discard time must be non-negative");
  if (!(sigma2_floor > 0.0)) throw ConfigError("variance floor must be positive");
  if (!(epoch_pre_ms >= 0.0) || !(epoch_post_ms > 0.0)) {
    throw ConfigError("epoch window must have non-negative pre and positive post extent");
  }
}

AnalysisResult analyze_recording(const Recording& rec, const EvokedPotential& p300_ref,
                                 Scenario scenario, const AnalysisConfig& config) {
  config.validate();
  validate(rec);
  if (p300_ref.samples.empty() || p300_ref.trial_count == 0) {
    throw DataError("analyze_recording: missing P300 reference");
  }
  if (p300_ref.sample_rate_hz != rec.sample_rate_hz) {
    throw ConfigError("analyze_recording: P300 reference sample rate differs from recording");
  }

  const FilterChain chain = scenario_chain(scenario, rec.sample_rate_hz, config.filter);
  const Recording filtered = apply_chain(chain, rec);

  // Noise statistics on the filtered task recording, transient discarded.
  const auto skip =
      static_cast<std::size_t>(std::lround(config.discard_start_s * rec.sample_rate_hz));
  if (skip >= filtered.samples.size()) {
    throw DataError("analyze_recording: recording shorter than the discard interval");
  }
  const std::span<const double> stats_view =
      std::span<const double>(filtered.samples).subspan(skip);

  auto tau = static_cast<std::size_t>(std::lround(config.tau_seconds * rec.sample_rate_hz));
  tau = std::max<std::size_t>(tau, 2);
  if (tau > stats_view.size()) {
    throw DataError("analyze_recording: recording shorter than one sliding window");
  }

  const NoiseProfile profile = noise_profile(stats_view, tau, config.sigma2_floor);
  const double sigma2_global = mean_power(stats_view);
  if (sigma2_global < config.sigma2_floor) {
    throw DataError("analyze_recording: degenerate recording, global power below the floor");
  }

  // The reference is filtered through the same chain; averaging and filtering
  // are both linear, so this matches averaging scenario-filtered epochs.
  EvokedPotential ep = p300_ref;
  ep.samples = apply_chain(chain, std::span<const double>(p300_ref.samples));
  const SignalPowerEstimate power = peak_signal_power(
      ep, config.peak_window, config.reduction_fraction, config.baseline_ms);

  const DomainMode domain = config.domain_override.value_or(default_domain_mode(scenario));
  const double t_c = domain == DomainMode::Time ? power.t_time : power.t_freq;

  AnalysisResult result;
  result.subject = rec.subject;
  result.task = rec.task;
  result.scenario = scenario;
  result.domain = domain;
  result.rho = profile.rho;
  result.sigma2_min = profile.sigma2_min;
  result.sigma2_max = profile.sigma2_max;
  result.sigma2_nominal = profile.sigma2_nominal;
  result.sigma2_global = sigma2_global;
  result.t_time = power.t_time;
  result.t_freq = power.t_freq;

  result.snr_linear = snr(t_c, sigma2_global);
  result.wall_linear = snr_wall(profile.rho);
  const DetectabilityVerdict verdict = decide_detectable(result.snr_linear, result.wall_linear);
  result.detectable = verdict.detectable;
  result.margin_db = verdict.margin_db;
  result.snr_db = result.snr_linear > 0.0 ? to_db(result.snr_linear) : -kInf;
  result.wall_db = result.wall_linear > 0.0 ? to_db(result.wall_linear) : -kInf;

  if (result.snr_linear <= 0.0) result.flags.push_back("zero-signal-power");
  if (p300_ref.trial_count < 10) result.flags.push_back("few-p300-trials");
  return result;
}

double t_tail(double t, double dof) {
  if (!(dof >= 1.0)) throw ConfigError("t_tail: degrees of freedom must be >= 1");
  if (std::isnan(t)) throw ConfigError("t_tail: NaN statistic");
  if (t == kInf) return 0.0;
  if (t == -kInf) return 1.0;

  const double half = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
  return t >= 0.0 ? half : 1.0 - half;
}

TaskSummary summarize_task(const std::string& task, Scenario scenario,
                           const std::vector<AnalysisResult>& results, double alpha,
                           std::vector<std::string> excluded) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");

  TaskSummary summary;
  summary.task = task;
  summary.scenario = scenario;
  summary.results = results;
  summary.excluded = std::move(excluded);
  summary.n_subjects = results.size();
  summary.alpha = alpha;

  if (results.size() < 2) {
    summary.insufficient = true;
    summary.p_value = std::numeric_limits<double>::quiet_NaN();
    summary.t_statistic = std::numeric_limits<double>::quiet_NaN();
    if (!results.empty()) {
      summary.mean_snr_db = results.front().snr_db;
      summary.mean_wall_db = results.front().wall_db;
      summary.mean_diff_db = results.front().snr_db - results.front().wall_db;
    }
    return summary;
  }

  const auto n = static_cast<double>(results.size());
  double snr_sum = 0.0, wall_sum = 0.0, diff_sum = 0.0;
  std::vector<double> diffs(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    snr_sum += results[i].snr_db;
    wall_sum += results[i].wall_db;
    diffs[i] = results[i].snr_db - results[i].wall_db;
    diff_sum += diffs[i];
  }
  summary.mean_snr_db = snr_sum / n;
  summary.mean_wall_db = wall_sum / n;
  summary.mean_diff_db = diff_sum / n;

  double ss = 0.0;
  for (double d : diffs) ss += (d - summary.mean_diff_db) * (d - summary.mean_diff_db);
  const double sd = std::sqrt(ss / (n - 1.0));

  if (sd == 0.0) {
    // All differences identical; the t statistic degenerates.
    summary.zero_variance = true;
    if (summary.mean_diff_db > 0.0) {
      summary.t_statistic = kInf;
      summary.p_value = 0.0;
    } else if (summary.mean_diff_db < 0.0) {
      summary.t_statistic = -kInf;
      summary.p_value = 1.0;
    } else {
      summary.t_statistic = 0.0;
      summary.p_value = 0.5;
    }
  } else {
    summary.t_statistic = summary.mean_diff_db / (sd / std::sqrt(n));
    summary.p_value = t_tail(summary.t_statistic, n - 1.0);
  }
  summary.significant = summary.p_value < alpha;
  return summary;
}

StudyResult run_study(const Dataset& dataset, const std::vector<Scenario>& scenarios,
                      const AnalysisConfig& config, double alpha) {
  config.validate();
  if (dataset.subjects.empty()) throw DataError("run_study: empty dataset");
  if (scenarios.empty()) throw ConfigError("run_study: no scenarios selected");

  struct Cell {
    const SubjectData* subject = nullptr;
    const Recording* task = nullptr;
    Scenario scenario = Scenario::A;
  };

  // Stimulus-locked references are scenario independent; build them once.
  std::vector<EvokedPotential> references(dataset.subjects.size());
  std::vector<std::string> exclusions;
  std::vector<bool> reference_ok(dataset.subjects.size(), false);
  for (std::size_t s = 0; s < dataset.subjects.size(); ++s) {
    try {
      const auto epochs = slice_epochs(dataset.subjects[s].p300_reference,
                                       config.epoch_pre_ms, config.epoch_post_ms);
      const auto pre = static_cast<std::size_t>(std::lround(
          config.epoch_pre_ms * 1e-3 * dataset.subjects[s].p300_reference.sample_rate_hz));
      references[s] =
          evoked_average(epochs, pre, dataset.subjects[s].p300_reference.sample_rate_hz);
      reference_ok[s] = true;
    } catch (const std::exception& err) {
      exclusions.push_back("subject " + dataset.subjects[s].subject +
                           ": P300 reference unusable: " + err.what());
    }
  }

  std::vector<Cell> cells;
  for (Scenario scenario : scenarios) {
    for (std::size_t s = 0; s < dataset.subjects.size(); ++s) {
      if (!reference_ok[s]) continue;
      for (const Recording& task : dataset.subjects[s].tasks) {
        cells.push_back({&dataset.subjects[s], &task, scenario});
      }
    }
  }

  // Independent per-cell analyses; slot-indexed outputs keep the result
  // deterministic under the parallel loop.
  std::vector<std::optional<AnalysisResult>> outcomes(cells.size());
  std::vector<std::string> failures(cells.size());
  const auto n_cells = static_cast<std::int64_t>(cells.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n_cells; ++i) {
    const Cell& cell = cells[static_cast<std::size_t>(i)];
    const std::size_t subject_index =
        static_cast<std::size_t>(cell.subject - dataset.subjects.data());
    try {
      outcomes[static_cast<std::size_t>(i)] =
          analyze_recording(*cell.task, references[subject_index], cell.scenario, config);
    } catch (const std::exception& err) {
      failures[static_cast<std::size_t>(i)] =
          cell_label(cell.subject->subject, cell.task->task, cell.scenario) + ": " +
          err.what();
    }
  }

  StudyResult study;
  std::map<std::pair<std::string, Scenario>, std::vector<AnalysisResult>> groups;
  std::map<std::pair<std::string, Scenario>, std::vector<std::string>> group_exclusions;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto key = std::make_pair(cells[i].task->task, cells[i].scenario);
    if (outcomes[i]) {
      study.all_results.push_back(*outcomes[i]);
      groups[key].push_back(*outcomes[i]);
    } else {
      exclusions.push_back(failures[i]);
      group_exclusions[key].push_back(failures[i]);
    }
  }

  for (auto& [key, results] : groups) {
    study.summaries.push_back(
        summarize_task(key.first, key.second, results, alpha, group_exclusions[key]));
  }
  // Groups that lost every recording still deserve a (insufficient) summary.
  for (auto& [key, notes] : group_exclusions) {
    if (groups.find(key) == groups.end()) {
      study.summaries.push_back(summarize_task(key.first, key.second, {}, alpha, notes));
    }
  }
  std::sort(study.summaries.begin(), study.summaries.end(),
            [](const TaskSummary& a, const TaskSummary& b) {
              return std::tie(a.task, a.scenario) < std::tie(b.task, b.scenario);
            });
  study.exclusions = std::move(exclusions);
  return study;
}

}  // namespace bciwall

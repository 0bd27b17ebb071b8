#ifndef BCIWALL_PIPELINE_HPP
#define BCIWALL_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "bciwall/estimation.hpp"
#include "bciwall/filters.hpp"
#include "bciwall/recording.hpp"

// Per-recording SNR / SNR-wall analysis and the cross-subject significance
// summary: filter, profile the noise, estimate the conscious-signal power,
// compare, aggregate.

namespace bciwall {

enum class DomainMode { Time, Frequency };

std::string to_string(DomainMode mode);
DomainMode domain_mode_from_string(const std::string& name);

// Frequency-domain power for the bandpass scenarios (C, D), time-domain for
// the wideband ones (A, B).
DomainMode default_domain_mode(Scenario scenario);

struct AnalysisConfig {
  double tau_seconds = 1.0;             // sliding-window length
  double reduction_fraction = 0.40;     // conscious band-power reduction
  PeakWindow peak_window{250.0, 500.0}; // post-stimulus search, ms
  double baseline_ms = 200.0;
  double epoch_pre_ms = 200.0;
  double epoch_post_ms = 800.0;
  double discard_start_s = 1.0;         // filter transient dropped from statistics
  double sigma2_floor = 1e-12;          // uV^2, degenerate-noise rejection
  FilterSettings filter{};
  std::optional<DomainMode> domain_override;

  void validate() const;
};

struct AnalysisResult {
  std::string subject;
  std::string task;
  Scenario scenario = Scenario::A;
  DomainMode domain = DomainMode::Time;
  double snr_linear = 0.0;
  double snr_db = 0.0;
  double wall_linear = 0.0;
  double wall_db = 0.0;       // -inf when the noise is stationary (wall = 0)
  double rho = 1.0;
  double sigma2_min = 0.0;
  double sigma2_max = 0.0;
  double sigma2_nominal = 0.0;
  double sigma2_global = 0.0; // noise power actually used for the SNR
  double t_time = 0.0;
  double t_freq = 0.0;
  bool detectable = false;
  double margin_db = 0.0;
  std::vector<std::string> flags;
};

// The full per-recording procedure: scenario-filter the recording and the
// evoked-potential reference, estimate the wall from sliding-window variance
// extrema and the SNR from the reference peak power over the global noise
// power, then compare the two.
AnalysisResult analyze_recording(const Recording& rec, const EvokedPotential& p300_ref,
                                 Scenario scenario, const AnalysisConfig& config = {});

// One-sided Student-t tail P(T_dof > t) through the regularized incomplete
// beta function.
double t_tail(double t, double dof);

struct TaskSummary {
  std::string task;
  Scenario scenario = Scenario::A;
  std::vector<AnalysisResult> results;   // one per included subject
  std::vector<std::string> excluded;     // audit notes for dropped recordings
  std::size_t n_subjects = 0;
  double mean_snr_db = 0.0;
  double mean_wall_db = 0.0;
  double mean_diff_db = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool significant = false;
  bool zero_variance = false;  // all differences identical
  bool insufficient = false;   // fewer than 2 valid subjects
};

// Paired one-sided t-test on per-subject (snr_db - wall_db) differences,
// H1: mean difference > 0.
TaskSummary summarize_task(const std::string& task, Scenario scenario,
                           const std::vector<AnalysisResult>& results, double alpha,
                           std::vector<std::string> excluded = {});

struct SubjectData {
  std::string subject;
  Recording p300_reference;
  std::vector<Recording> tasks;
};

struct Dataset {
  std::vector<SubjectData> subjects;
};

struct StudyResult {
  std::vector<TaskSummary> summaries;       // tasks x scenarios, sorted
  std::vector<AnalysisResult> all_results;
  std::vector<std::string> exclusions;      // per-cell failure audit
};

// Cross product of tasks and scenarios. Per-recording failures become
// exclusions; the study itself never aborts on one bad cell.
StudyResult run_study(const Dataset& dataset, const std::vector<Scenario>& scenarios,
                      const AnalysisConfig& config, double alpha);

}  // namespace bciwall

#endif

#ifndef BCIWALL_SYNTHETIC_DATASET_HPP
#define BCIWALL_SYNTHETIC_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bciwall/pipeline.hpp"

namespace bciwall {

// Desk-scale stand-in for a real EEG study: a cohort of synthetic subjects
// whose task recordings carry strong 25-60 Hz burst noise over a stationary
// background, plus a stimulus-locked alpha-burst response in the reference
// recordings. Engineered so that the wideband scenario A fails the wall test
// for every subject while the narrowband scenario D passes for every subject.
struct SyntheticCohortConfig {
  std::size_t n_subjects = 6;
  std::vector<std::string> tasks = {"colouring", "sudoku"};
  double sample_rate_hz = 250.0;
  double task_duration_s = 60.0;
  std::size_t n_stimuli = 40;           // triggers in the reference recording
  double response_amplitude_uv = 10.0;  // stimulus-locked alpha-burst peak
  double response_latency_s = 0.3;
  double background_sigma_uv = 3.0;
  double alpha_amplitude_uv = 3.0;      // steady 10 Hz component in tasks
  double mains_amplitude_uv = 5.0;      // 50 Hz interference, removed by the notch
  double burst_extra_power_uv2 = 400.0; // 25-60 Hz burst power on top of background
  std::uint64_t seed = 20260809;
};

Dataset build_synthetic_cohort(const SyntheticCohortConfig& config = {});

// Same cohort written as TSV files (volts, tab-separated, trigger column in
// the reference files) plus a manifest.json, ready for the study command.
void write_synthetic_cohort(const SyntheticCohortConfig& config,
                            const std::filesystem::path& directory);

}  // namespace bciwall

#endif

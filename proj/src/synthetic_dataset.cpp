#include "bciwall/synthetic_dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "bciwall/errors.hpp"
#include "bciwall/io.hpp"
#include "bciwall/rng.hpp"

namespace bciwall {

namespace {

constexpr double kPi = std::numbers::pi;

// Stream index bases per signal role, so every component has its own
// reproducible substream.
constexpr std::uint64_t kTaskNoiseBase = 1000;
constexpr std::uint64_t kRefNoiseBase = 2000;
constexpr std::uint64_t kScheduleBase = 3000;

// 10 Hz carrier under a raised-cosine envelope; peaks at exactly `amplitude`
// in the envelope center.
double alpha_burst(double t_s, double center_s, double width_s, double amplitude) {
  const double half = width_s / 2.0;
  if (t_s < center_s - half || t_s > center_s + half) return 0.0;
  const double envelope = 0.5 * (1.0 + std::cos(kPi * (t_s - center_s) / half));
  return amplitude * envelope * std::cos(2.0 * kPi * 10.0 * (t_s - center_s));
}

struct BurstBand {
  double freq_hz;
};

// The burst rides on four tones spread over 25-60 Hz; total power is
// n_tones * amplitude^2 / 2, which makes the window variance deterministic.
const BurstBand kBurstTones[] = {{27.0}, {35.0}, {43.0}, {57.0}};

double burst_tone_amplitude(double total_power) {
  return std::sqrt(2.0 * total_power / (4.0));
}

Recording make_task_recording(const SyntheticCohortConfig& config, std::size_t subject_index,
                              std::size_t task_index, const std::string& subject,
                              const std::string& task) {
  const double fs = config.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::lround(config.task_duration_s * fs));
  GaussianStream noise = gaussian_stream(
      config.seed, kTaskNoiseBase + subject_index * 100 + task_index);
  Xoshiro256pp phases(stream_key(config.seed, kScheduleBase + subject_index * 100 + task_index));

  double tone_phase[4];
  for (double& p : tone_phase) p = 2.0 * kPi * phases.uniform01();
  const double tone_amp = burst_tone_amplitude(config.burst_extra_power_uv2);

  // Three 6-second bursts: muscle activity at 10-16 s, 30-36 s and 48-54 s.
  auto in_burst = [&](double t) {
    return (t >= 10.0 && t < 16.0) || (t >= 30.0 && t < 36.0) || (t >= 48.0 && t < 54.0);
  };

  Recording rec;
  rec.sample_rate_hz = fs;
  rec.subject = subject;
  rec.task = task;
  rec.channel = "Cz";
  rec.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    double v = config.background_sigma_uv * noise.next();
    v += config.alpha_amplitude_uv * std::sin(2.0 * kPi * 10.0 * t);
    v += config.mains_amplitude_uv * std::sin(2.0 * kPi * 50.0 * t);
    if (in_burst(t)) {
      for (int k = 0; k < 4; ++k) {
        v += tone_amp * std::sin(2.0 * kPi * kBurstTones[k].freq_hz * t + tone_phase[k]);
      }
    }
    rec.samples[i] = v;
  }
  return rec;
}

Recording make_reference_recording(const SyntheticCohortConfig& config,
                                   std::size_t subject_index, const std::string& subject) {
  const double fs = config.sample_rate_hz;
  Xoshiro256pp schedule(stream_key(config.seed, kScheduleBase + subject_index));

  // Stimuli arrive 7-13 s apart.
  std::vector<double> onsets_s;
  double t = 5.0;
  for (std::size_t k = 0; k < config.n_stimuli; ++k) {
    onsets_s.push_back(t);
    t += 7.0 + 6.0 * schedule.uniform01();
  }
  const double duration = t + 2.0;
  const auto n = static_cast<std::size_t>(std::lround(duration * fs));

  GaussianStream noise = gaussian_stream(config.seed, kRefNoiseBase + subject_index);

  Recording rec;
  rec.sample_rate_hz = fs;
  rec.subject = subject;
  rec.task = "p300";
  rec.channel = "Cz";
  rec.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ts = static_cast<double>(i) / fs;
    double v = config.background_sigma_uv * noise.next();
    v += config.mains_amplitude_uv * std::sin(2.0 * kPi * 50.0 * ts);
    rec.samples[i] = v;
  }
  for (double onset : onsets_s) {
    rec.triggers.push_back(static_cast<std::size_t>(std::lround(onset * fs)));
    for (std::size_t i = rec.triggers.back();
         i < n && static_cast<double>(i) / fs < onset + 1.0; ++i) {
      const double ts = static_cast<double>(i) / fs;
      rec.samples[i] += alpha_burst(ts - onset, config.response_latency_s, 0.3,
                                    config.response_amplitude_uv);
    }
  }
  return rec;
}

std::string subject_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%02zu", index + 1);
  return buf;
}

}  // namespace

Dataset build_synthetic_cohort(const SyntheticCohortConfig& config) {
  if (config.n_subjects == 0) throw ConfigError("synthetic cohort needs subjects");
  if (config.tasks.empty()) throw ConfigError("synthetic cohort needs tasks");

  Dataset dataset;
  for (std::size_t s = 0; s < config.n_subjects; ++s) {
    SubjectData subject;
    subject.subject = subject_name(s);
    subject.p300_reference = make_reference_recording(config, s, subject.subject);
    for (std::size_t t = 0; t < config.tasks.size(); ++t) {
      subject.tasks.push_back(
          make_task_recording(config, s, t, subject.subject, config.tasks[t]));
    }
    dataset.subjects.push_back(std::move(subject));
  }
  return dataset;
}

void write_synthetic_cohort(const SyntheticCohortConfig& config,
                            const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const Dataset dataset = build_synthetic_cohort(config);

  DatasetManifest manifest;
  manifest.root = directory;

  auto write_tsv = [&](const Recording& rec, const std::filesystem::path& name,
                       bool with_trigger) {
    std::ofstream out(directory / name);
    if (!out) throw IoError("cannot open '" + (directory / name).string() + "' for writing");
    std::size_t next_trigger = 0;
    char buf[64];
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
      const double t = static_cast<double>(i) / rec.sample_rate_hz;
      std::snprintf(buf, sizeof(buf), "%.6f\t%.12e", t, rec.samples[i] * 1e-6);
      out << buf;
      if (with_trigger) {
        int trig = 0;
        if (next_trigger < rec.triggers.size() && rec.triggers[next_trigger] == i) {
          trig = 1;
          ++next_trigger;
        }
        out << '\t' << trig;
      }
      out << '\n';
    }
    if (!out) throw IoError("failed while writing '" + (directory / name).string() + "'");
  };

  for (const auto& subject : dataset.subjects) {
    ManifestEntry ref;
    ref.subject = subject.subject;
    ref.task = "p300";
    ref.kind = "p300";
    ref.channel = "Cz";
    ref.file = subject.subject + "_p300.tsv";
    ref.sample_rate_hz = config.sample_rate_hz;
    ref.columns.sample_col = 1;
    ref.columns.trigger_col = 2;
    ref.columns.delimiter = '\t';
    ref.columns.unit = "V";
    write_tsv(subject.p300_reference, ref.file, true);
    manifest.entries.push_back(std::move(ref));

    for (const auto& task : subject.tasks) {
      ManifestEntry entry;
      entry.subject = subject.subject;
      entry.task = task.task;
      entry.kind = "task";
      entry.channel = "Cz";
      entry.file = subject.subject + "_" + task.task + ".tsv";
      entry.sample_rate_hz = config.sample_rate_hz;
      entry.columns.sample_col = 1;
      entry.columns.delimiter = '\t';
      entry.columns.unit = "V";
      write_tsv(task, entry.file, false);
      manifest.entries.push_back(std::move(entry));
    }
  }
  save_manifest(manifest, directory / "manifest.json");
}

}  // namespace bciwall

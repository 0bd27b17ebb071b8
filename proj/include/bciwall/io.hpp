#ifndef BCIWALL_IO_HPP
#define BCIWALL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bciwall/pipeline.hpp"
#include "bciwall/recording.hpp"

namespace bciwall {

// Where the numbers live in a delimited text file. Column indices are
// 0-based. delimiter 0 means auto-detect (tab, then comma, then whitespace).
struct ColumnMap {
  int sample_col = 1;
  int trigger_col = -1;  // -1: no trigger column
  bool has_header = false;
  char delimiter = 0;
  std::string unit = "V";  // "V" or "uV"; stored internally in uV
};

// Strict ingestion: any malformed or non-finite numeric aborts the file with
// a located error. Trigger onsets are rising edges (above 0.5) of the trigger
// column, unless trigger_file (one 0-based sample index per line) is given.
Recording load_recording(const std::filesystem::path& path, const ColumnMap& columns,
                         double sample_rate_hz, const std::string& subject = "",
                         const std::string& task = "", const std::string& channel = "",
                         const std::optional<std::filesystem::path>& trigger_file = {});

struct ManifestEntry {
  std::string subject;
  std::string task;
  std::string kind = "task";  // "task" or "p300"
  std::string channel;
  std::filesystem::path file;
  std::optional<std::filesystem::path> trigger_file;
  double sample_rate_hz = 250.0;
  ColumnMap columns{};
};

struct ManifestExclusion {
  std::string id;
  std::string reason;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  std::vector<ManifestExclusion> exclusions;
};

// Parses and validates a manifest: files must exist, subject/task pairs must
// be unique per channel, every subject needs exactly one p300 entry.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Loads every manifest entry. Subjects on the manifest's exclusion list are
// skipped with a note. When `ingestion_errors` is given, a recording that
// fails ingestion is dropped with a located note and loading continues (the
// study goes on without it); when it is null the first failure throws.
Dataset load_dataset(const DatasetManifest& manifest,
                     std::vector<std::string>* ingestion_errors = nullptr);

struct RunConfig {
  std::vector<Scenario> scenarios = {Scenario::A, Scenario::B, Scenario::C, Scenario::D};
  AnalysisConfig analysis{};
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

// JSON config document; every field optional, unknown fields rejected.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);
std::string run_config_to_json(const RunConfig& config);

// One CSV row per result, stable column order, lossless numeric round trip.
void write_results_csv(const std::vector<AnalysisResult>& results,
                       const std::filesystem::path& path);
std::vector<AnalysisResult> read_results_csv(const std::filesystem::path& path);

void write_summaries_csv(const std::vector<TaskSummary>& summaries,
                         const std::filesystem::path& path);

// Companion JSON: full config, filter-chain metadata (ordered stage lists
// with coefficients) and the exclusion audit.
void write_run_json(const RunConfig& config, const StudyResult& study,
                    double sample_rate_hz, const std::filesystem::path& path);

}  // namespace bciwall

#endif

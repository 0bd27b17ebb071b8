#include "bciwall/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bciwall/errors.hpp"

namespace bciwall {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& context) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DataError(context + ": cannot parse '" + text + "' as a number");
  }
  if (used != text.size()) {
    throw DataError(context + ": trailing garbage in numeric field '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  if (delimiter == ' ') {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    return fields;
  }
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delimiter)) fields.push_back(field);
  return fields;
}

char detect_delimiter(const std::string& line) {
  if (line.find('\t') != std::string::npos) return '\t';
  if (line.find(',') != std::string::npos) return ',';
  return ' ';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::vector<std::size_t> load_trigger_file(const std::filesystem::path& path,
                                           std::size_t n_samples) {
  std::ifstream in = open_input(path);
  std::vector<std::size_t> triggers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const double value = parse_double(line, path.string() + ":" + std::to_string(line_no));
    if (value < 0.0 || value != std::floor(value)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": trigger index must be a non-negative integer");
    }
    const auto idx = static_cast<std::size_t>(value);
    if (idx >= n_samples) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": trigger index " +
                      std::to_string(idx) + " past end of recording");
    }
    triggers.push_back(idx);
  }
  return triggers;
}

json chain_to_json(const FilterChain& chain) {
  json stages = json::array();
  for (const auto& stage : chain.stages) {
    json s;
    s["label"] = stage.label;
    switch (stage.kind) {
      case StageKind::Biquad:
        s["kind"] = "biquad";
        s["b"] = {stage.coeffs.b0, stage.coeffs.b1, stage.coeffs.b2};
        s["a"] = {1.0, stage.coeffs.a1, stage.coeffs.a2};
        break;
      case StageKind::FirstDifference:
        s["kind"] = "first_difference";
        break;
      case StageKind::PassThrough:
        s["kind"] = "pass_through";
        break;
    }
    stages.push_back(std::move(s));
  }
  json out;
  out["sample_rate_hz"] = chain.sample_rate_hz;
  if (chain.scenario) out["scenario"] = to_string(*chain.scenario);
  out["stages"] = std::move(stages);
  return out;
}

ColumnMap columns_from_json(const json& j) {
  ColumnMap map;
  for (const auto& [key, value] : j.items()) {
    if (key == "sample") {
      map.sample_col = value.get<int>();
    } else if (key == "trigger") {
      map.trigger_col = value.get<int>();
    } else if (key == "header") {
      map.has_header = value.get<bool>();
    } else if (key == "unit") {
      map.unit = value.get<std::string>();
    } else if (key == "delimiter") {
      const auto text = value.get<std::string>();
      if (text == "tab") map.delimiter = '\t';
      else if (text == "comma") map.delimiter = ',';
      else if (text == "space") map.delimiter = ' ';
      else if (text == "auto") map.delimiter = 0;
      else throw ConfigError("manifest: unknown delimiter '" + text + "'");
    } else {
      throw ConfigError("manifest: unknown column-map field '" + key + "'");
    }
  }
  if (map.unit != "V" && map.unit != "uV") {
    throw ConfigError("manifest: unit must be 'V' or 'uV', got '" + map.unit + "'");
  }
  return map;
}

json columns_to_json(const ColumnMap& map) {
  json j;
  j["sample"] = map.sample_col;
  if (map.trigger_col >= 0) j["trigger"] = map.trigger_col;
  j["header"] = map.has_header;
  j["unit"] = map.unit;
  j["delimiter"] = map.delimiter == '\t'  ? "tab"
                   : map.delimiter == ',' ? "comma"
                   : map.delimiter == ' ' ? "space"
                                          : "auto";
  return j;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = {
      "schema_version", "subject",    "task",           "scenario",      "domain",
      "snr_linear",     "snr_db",     "wall_linear",    "wall_db",       "rho",
      "sigma2_min",     "sigma2_max", "sigma2_nominal", "sigma2_global", "t_time",
      "t_freq",         "detectable", "margin_db",      "flags"};
  return columns;
}

}  // namespace

Recording load_recording(const std::filesystem::path& path, const ColumnMap& columns,
                         double sample_rate_hz, const std::string& subject,
                         const std::string& task, const std::string& channel,
                         const std::optional<std::filesystem::path>& trigger_file) {
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be positive");
  if (columns.sample_col < 0) throw ConfigError("sample column index must be >= 0");
  if (!std::filesystem::exists(path)) throw IoError("no such file: '" + path.string() + "'");

  std::ifstream in = open_input(path);
  const double scale = columns.unit == "uV" ? 1.0 : 1e6;

  Recording rec;
  rec.sample_rate_hz = sample_rate_hz;
  rec.subject = subject;
  rec.task = task;
  rec.channel = channel;

  std::string line;
  std::size_t line_no = 0;
  bool header_pending = columns.has_header;
  char delimiter = columns.delimiter;
  double prev_trigger = 0.0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (delimiter == 0) delimiter = detect_delimiter(line);

    const std::vector<std::string> fields = split_line(line, delimiter);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (static_cast<std::size_t>(columns.sample_col) >= fields.size()) {
      throw DataError(where + ": expected at least " + std::to_string(columns.sample_col + 1) +
                      " columns, found " + std::to_string(fields.size()));
    }

    const double value =
        parse_double(fields[static_cast<std::size_t>(columns.sample_col)], where);
    if (!std::isfinite(value)) throw DataError(where + ": non-finite sample value");
    rec.samples.push_back(value * scale);

    if (columns.trigger_col >= 0 && !trigger_file) {
      if (static_cast<std::size_t>(columns.trigger_col) >= fields.size()) {
        throw DataError(where + ": trigger column missing");
      }
      const double trig =
          parse_double(fields[static_cast<std::size_t>(columns.trigger_col)], where);
      if (trig > 0.5 && prev_trigger <= 0.5) rec.triggers.push_back(rec.samples.size() - 1);
      prev_trigger = trig;
    }
  }

  if (rec.samples.empty()) throw DataError("'" + path.string() + "' contains no samples");
  if (trigger_file) rec.triggers = load_trigger_file(*trigger_file, rec.samples.size());
  validate(rec);
  return rec;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& err) {
    throw IoError("manifest '" + path.string() + "' is not valid JSON: " + err.what());
  }

  DatasetManifest manifest;
  manifest.root = path.parent_path();
  if (doc.contains("root")) {
    const std::filesystem::path declared = doc["root"].get<std::string>();
    manifest.root = declared.is_absolute() ? declared : manifest.root / declared;
  }

  if (!doc.contains("recordings") || !doc["recordings"].is_array()) {
    throw ConfigError("manifest: missing 'recordings' array");
  }
  for (const auto& j : doc["recordings"]) {
    ManifestEntry entry;
    entry.subject = j.at("subject").get<std::string>();
    entry.task = j.at("task").get<std::string>();
    entry.file = std::filesystem::path(j.at("file").get<std::string>());
    if (j.contains("kind")) entry.kind = j["kind"].get<std::string>();
    if (j.contains("channel")) entry.channel = j["channel"].get<std::string>();
    if (j.contains("sample_rate_hz")) entry.sample_rate_hz = j["sample_rate_hz"].get<double>();
    if (j.contains("columns")) entry.columns = columns_from_json(j["columns"]);
    if (j.contains("trigger_file")) {
      entry.trigger_file = std::filesystem::path(j["trigger_file"].get<std::string>());
    }
    if (entry.kind != "task" && entry.kind != "p300") {
      throw ConfigError("manifest: entry kind must be 'task' or 'p300', got '" + entry.kind +
                        "'");
    }
    manifest.entries.push_back(std::move(entry));
  }
  if (doc.contains("exclusions")) {
    for (const auto& j : doc["exclusions"]) {
      manifest.exclusions.push_back(
          {j.at("id").get<std::string>(), j.value("reason", std::string("unspecified"))});
    }
  }

  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::map<std::string, int> p300_count;
  std::set<std::string> subjects_with_tasks;
  for (const auto& entry : manifest.entries) {
    const auto full = entry.file.is_absolute() ? entry.file : manifest.root / entry.file;
    if (!std::filesystem::exists(full)) {
      throw IoError("manifest references missing file '" + full.string() + "'");
    }
    if (entry.trigger_file) {
      const auto trig = entry.trigger_file->is_absolute()
                            ? *entry.trigger_file
                            : manifest.root / *entry.trigger_file;
      if (!std::filesystem::exists(trig)) {
        throw IoError("manifest references missing trigger file '" + trig.string() + "'");
      }
    }
    if (!seen.insert({entry.subject, entry.task, entry.channel}).second) {
      throw ConfigError("manifest: duplicate subject/task pair: " + entry.subject + "/" +
                        entry.task);
    }
    if (entry.kind == "p300") {
      ++p300_count[entry.subject];
    } else {
      subjects_with_tasks.insert(entry.subject);
    }
  }
  for (const auto& subject : subjects_with_tasks) {
    const auto it = p300_count.find(subject);
    if (it == p300_count.end()) {
      throw ConfigError("manifest: subject '" + subject + "' has tasks but no p300 reference");
    }
    if (it->second > 1) {
      throw ConfigError("manifest: subject '" + subject + "' has multiple p300 references");
    }
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json recs = json::array();
  for (const auto& entry : manifest.entries) {
    json j;
    j["subject"] = entry.subject;
    j["task"] = entry.task;
    j["kind"] = entry.kind;
    if (!entry.channel.empty()) j["channel"] = entry.channel;
    j["file"] = entry.file.string();
    if (entry.trigger_file) j["trigger_file"] = entry.trigger_file->string();
    j["sample_rate_hz"] = entry.sample_rate_hz;
    j["columns"] = columns_to_json(entry.columns);
    recs.push_back(std::move(j));
  }
  doc["recordings"] = std::move(recs);
  json excl = json::array();
  for (const auto& e : manifest.exclusions) excl.push_back({{"id", e.id}, {"reason", e.reason}});
  doc["exclusions"] = std::move(excl);

  std::ofstream out = open_output(path);
  out << doc.dump(2) << "\n";
}

Dataset load_dataset(const DatasetManifest& manifest,
                     std::vector<std::string>* ingestion_errors) {
  std::set<std::string> excluded;
  for (const auto& e : manifest.exclusions) {
    excluded.insert(e.id);
    if (ingestion_errors) {
      ingestion_errors->push_back("subject " + e.id + " excluded by manifest: " + e.reason);
    }
  }

  std::map<std::string, SubjectData> by_subject;
  for (const auto& entry : manifest.entries) {
    if (excluded.count(entry.subject)) continue;
    const auto full = entry.file.is_absolute() ? entry.file : manifest.root / entry.file;
    std::optional<std::filesystem::path> trigger_file;
    if (entry.trigger_file) {
      trigger_file = entry.trigger_file->is_absolute() ? *entry.trigger_file
                                                       : manifest.root / *entry.trigger_file;
    }
    Recording rec;
    try {
      rec = load_recording(full, entry.columns, entry.sample_rate_hz, entry.subject,
                           entry.task, entry.channel, trigger_file);
    } catch (const std::exception& err) {
      if (!ingestion_errors) throw;
      ingestion_errors->push_back("subject " + entry.subject + ", task " + entry.task +
                                  " dropped at ingestion: " + err.what());
      continue;
    }
    auto& subject = by_subject[entry.subject];
    subject.subject = entry.subject;
    if (entry.kind == "p300") {
      subject.p300_reference = std::move(rec);
    } else {
      subject.tasks.push_back(std::move(rec));
    }
  }

  Dataset dataset;
  for (auto& [name, data] : by_subject) dataset.subjects.push_back(std::move(data));
  return dataset;
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }

  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "schema_version") {
      if (value.get<int>() != kSchemaVersion) throw ConfigError("unsupported config schema");
    } else if (key == "scenarios") {
      config.scenarios.clear();
      for (const auto& tag : value) {
        config.scenarios.push_back(scenario_from_string(tag.get<std::string>()));
      }
    } else if (key == "tau_seconds") {
      config.analysis.tau_seconds = value.get<double>();
    } else if (key == "reduction_fraction") {
      config.analysis.reduction_fraction = value.get<double>();
    } else if (key == "alpha") {
      config.alpha = value.get<double>();
    } else if (key == "peak_window_ms") {
      config.analysis.peak_window = {value.at(0).get<double>(), value.at(1).get<double>()};
    } else if (key == "baseline_ms") {
      config.analysis.baseline_ms = value.get<double>();
    } else if (key == "epoch_pre_ms") {
      config.analysis.epoch_pre_ms = value.get<double>();
    } else if (key == "epoch_post_ms") {
      config.analysis.epoch_post_ms = value.get<double>();
    } else if (key == "dc_cutoff_hz") {
      config.analysis.filter.dc_cutoff_hz = value.get<double>();
    } else if (key == "notch_center_hz") {
      config.analysis.filter.notch_center_hz = value.get<double>();
    } else if (key == "notch_bandwidth_hz") {
      config.analysis.filter.notch_bandwidth_hz = value.get<double>();
    } else if (key == "discard_start_s") {
      config.analysis.discard_start_s = value.get<double>();
    } else if (key == "sigma2_floor") {
      config.analysis.sigma2_floor = value.get<double>();
    } else if (key == "domain_mode") {
      const auto mode = value.get<std::string>();
      if (mode == "auto") {
        config.analysis.domain_override.reset();
      } else {
        config.analysis.domain_override = domain_mode_from_string(mode);
      }
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  config.analysis.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string run_config_to_json(const RunConfig& config) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json scenarios = json::array();
  for (Scenario s : config.scenarios) scenarios.push_back(to_string(s));
  doc["scenarios"] = std::move(scenarios);
  doc["tau_seconds"] = config.analysis.tau_seconds;
  doc["reduction_fraction"] = config.analysis.reduction_fraction;
  doc["alpha"] = config.alpha;
  doc["peak_window_ms"] = {config.analysis.peak_window.lo_ms,
                           config.analysis.peak_window.hi_ms};
  doc["baseline_ms"] = config.analysis.baseline_ms;
  doc["epoch_pre_ms"] = config.analysis.epoch_pre_ms;
  doc["epoch_post_ms"] = config.analysis.epoch_post_ms;
  doc["dc_cutoff_hz"] = config.analysis.filter.dc_cutoff_hz;
  doc["notch_center_hz"] = config.analysis.filter.notch_center_hz;
  doc["notch_bandwidth_hz"] = config.analysis.filter.notch_bandwidth_hz;
  doc["discard_start_s"] = config.analysis.discard_start_s;
  doc["sigma2_floor"] = config.analysis.sigma2_floor;
  doc["domain_mode"] = config.analysis.domain_override
                           ? to_string(*config.analysis.domain_override)
                           : std::string("auto");
  doc["seed"] = config.seed;
  return doc.dump(2);
}

void write_results_csv(const std::vector<AnalysisResult>& results,
                       const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  const auto& columns = result_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << columns[i] << (i + 1 == columns.size() ? "\n" : ",");
  }
  for (const auto& r : results) {
    std::string flags;
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
      flags += r.flags[i];
      if (i + 1 != r.flags.size()) flags += ';';
    }
    out << kSchemaVersion << ',' << r.subject << ',' << r.task << ',' << to_string(r.scenario)
        << ',' << to_string(r.domain) << ',' << format_double(r.snr_linear) << ','
        << format_double(r.snr_db) << ',' << format_double(r.wall_linear) << ','
        << format_double(r.wall_db) << ',' << format_double(r.rho) << ','
        << format_double(r.sigma2_min) << ',' << format_double(r.sigma2_max) << ','
        << format_double(r.sigma2_nominal) << ',' << format_double(r.sigma2_global) << ','
        << format_double(r.t_time) << ',' << format_double(r.t_freq) << ','
        << (r.detectable ? 1 : 0) << ',' << format_double(r.margin_db) << ',' << flags << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

std::vector<AnalysisResult> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");

  std::vector<AnalysisResult> results;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_line(line, ',');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() < result_columns().size() - 1) {
      throw DataError(where + ": truncated row");
    }
    AnalysisResult r;
    r.subject = fields[1];
    r.task = fields[2];
    r.scenario = scenario_from_string(fields[3]);
    r.domain = domain_mode_from_string(fields[4]);
    r.snr_linear = parse_double(fields[5], where);
    r.snr_db = parse_double(fields[6], where);
    r.wall_linear = parse_double(fields[7], where);
    r.wall_db = parse_double(fields[8], where);
    r.rho = parse_double(fields[9], where);
    r.sigma2_min = parse_double(fields[10], where);
    r.sigma2_max = parse_double(fields[11], where);
    r.sigma2_nominal = parse_double(fields[12], where);
    r.sigma2_global = parse_double(fields[13], where);
    r.t_time = parse_double(fields[14], where);
    r.t_freq = parse_double(fields[15], where);
    r.detectable = fields[16] == "1";
    r.margin_db = parse_double(fields[17], where);
    if (fields.size() > 18 && !fields[18].empty()) {
      for (const auto& flag : split_line(fields[18], ';')) r.flags.push_back(flag);
    }
    results.push_back(std::move(r));
  }
  return results;
}

void write_summaries_csv(const std::vector<TaskSummary>& summaries,
                         const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "schema_version,task,scenario,n_subjects,mean_snr_db,mean_wall_db,mean_diff_db,"
         "t_statistic,p_value,significant,zero_variance,insufficient,n_excluded\n";
  for (const auto& s : summaries) {
    out << kSchemaVersion << ',' << s.task << ',' << to_string(s.scenario) << ','
        << s.n_subjects << ',' << format_double(s.mean_snr_db) << ','
        << format_double(s.mean_wall_db) << ',' << format_double(s.mean_diff_db) << ','
        << format_double(s.t_statistic) << ',' << format_double(s.p_value) << ','
        << (s.significant ? 1 : 0) << ',' << (s.zero_variance ? 1 : 0) << ','
        << (s.insufficient ? 1 : 0) << ',' << s.excluded.size() << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

void write_run_json(const RunConfig& config, const StudyResult& study,
                    double sample_rate_hz, const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config"] = json::parse(run_config_to_json(config));
  json chains;
  for (Scenario scenario : config.scenarios) {
    chains[to_string(scenario)] =
        chain_to_json(scenario_chain(scenario, sample_rate_hz, config.analysis.filter));
  }
  doc["filter_chains"] = std::move(chains);
  doc["exclusions"] = study.exclusions;
  doc["n_results"] = study.all_results.size();
  doc["n_summaries"] = study.summaries.size();

  std::ofstream out = open_output(path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace bciwall

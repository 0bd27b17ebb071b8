// Command-line surface: filter / wall / analyze / study / simulate.
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bciwall/chart.hpp"
#include "bciwall/detection.hpp"
#include "bciwall/errors.hpp"
#include "bciwall/estimation.hpp"
#include "bciwall/filters.hpp"
#include "bciwall/io.hpp"
#include "bciwall/pipeline.hpp"
#include "bciwall/simulation.hpp"

namespace {

using namespace bciwall;

struct InputOptions {
  std::string path;
  double rate = 0.0;  // 0: take the config / manifest default
  int sample_col = 1;
  int trigger_col = -1;
  bool header = false;
  std::string delimiter = "auto";
  std::string unit = "V";
  std::string trigger_file;
};

void add_input_options(CLI::App* cmd, InputOptions* in) {
  cmd->add_option("input", in->path, "input CSV/TSV file")->required();
  cmd->add_option("--rate", in->rate, "sample rate in Hz (default 250)");
  cmd->add_option("--column", in->sample_col, "0-based sample column (default 1)");
  cmd->add_option("--trigger-column", in->trigger_col, "0-based trigger column");
  cmd->add_flag("--header", in->header, "skip the first non-comment line");
  cmd->add_option("--delimiter", in->delimiter, "tab | comma | space | auto");
  cmd->add_option("--unit", in->unit, "V or uV (default V)");
  cmd->add_option("--trigger-file", in->trigger_file,
                  "file with one 0-based trigger sample index per line");
}

Recording load_input(const InputOptions& in, double default_rate) {
  ColumnMap columns;
  columns.sample_col = in.sample_col;
  columns.trigger_col = in.trigger_col;
  columns.has_header = in.header;
  columns.unit = in.unit;
  if (in.delimiter == "tab") columns.delimiter = '\t';
  else if (in.delimiter == "comma") columns.delimiter = ',';
  else if (in.delimiter == "space") columns.delimiter = ' ';
  else if (in.delimiter == "auto") columns.delimiter = 0;
  else throw ConfigError("unknown delimiter '" + in.delimiter + "'");

  std::optional<std::filesystem::path> trigger_file;
  if (!in.trigger_file.empty()) trigger_file = in.trigger_file;
  const double rate = in.rate > 0.0 ? in.rate : default_rate;
  return load_recording(in.path, columns, rate, "", "", "", trigger_file);
}

std::string fmt(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void print_result(const AnalysisResult& r) {
  std::cout << "scenario        " << to_string(r.scenario) << " (" << to_string(r.domain)
            << "-domain signal power)\n"
            << "sigma2_min      " << fmt(r.sigma2_min) << " uV^2\n"
            << "sigma2_max      " << fmt(r.sigma2_max) << " uV^2\n"
            << "sigma2_nominal  " << fmt(r.sigma2_nominal) << " uV^2\n"
            << "sigma2_global   " << fmt(r.sigma2_global) << " uV^2\n"
            << "rho             " << fmt(r.rho) << "\n"
            << "t_time          " << fmt(r.t_time) << " uV^2\n"
            << "t_freq          " << fmt(r.t_freq) << " uV^2\n"
            << "snr             " << fmt(r.snr_linear) << " (" << fmt(r.snr_db, 4) << " dB)\n"
            << "snr_wall        " << fmt(r.wall_linear) << " ("
            << (std::isinf(r.wall_db) ? std::string("-inf") : fmt(r.wall_db, 4)) << " dB)\n"
            << "detectable      " << (r.detectable ? "yes" : "no") << "\n";
  if (!r.flags.empty()) {
    std::cout << "flags           ";
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
      std::cout << r.flags[i] << (i + 1 == r.flags.size() ? "\n" : ";");
    }
  }
}

int run_filter(const InputOptions& in, const RunConfig& config, const std::string& scenario,
               const std::string& out_path, const std::string& chain_json) {
  const Recording rec = load_input(in, 250.0);
  const FilterChain chain =
      scenario_chain(scenario_from_string(scenario), rec.sample_rate_hz,
                     config.analysis.filter);
  const Recording filtered = apply_chain(chain, rec);

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << "time_s,value_uV\n";
  char buf[64];
  for (std::size_t i = 0; i < filtered.samples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.12g\n",
                  static_cast<double>(i) / filtered.sample_rate_hz, filtered.samples[i]);
    out << buf;
  }
  if (!out) throw IoError("failed while writing '" + out_path + "'");

  if (!chain_json.empty()) {
    nlohmann::json doc;
    doc["description"] = chain_description(chain);
    doc["sample_rate_hz"] = chain.sample_rate_hz;
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& stage : chain.stages) {
      nlohmann::json s;
      s["label"] = stage.label;
      s["kind"] = stage.kind == StageKind::Biquad            ? "biquad"
                  : stage.kind == StageKind::FirstDifference ? "first_difference"
                                                             : "pass_through";
      if (stage.kind == StageKind::Biquad) {
        s["b"] = {stage.coeffs.b0, stage.coeffs.b1, stage.coeffs.b2};
        s["a"] = {1.0, stage.coeffs.a1, stage.coeffs.a2};
      }
      stages.push_back(s);
    }
    doc["stages"] = stages;
    std::ofstream js(chain_json);
    if (!js) throw IoError("cannot open '" + chain_json + "' for writing");
    js << doc.dump(2) << "\n";
  }

  std::cout << "wrote " << filtered.samples.size() << " filtered samples to " << out_path
            << " (" << chain_description(chain) << ")\n";
  return 0;
}

int run_wall(const InputOptions& in, const RunConfig& config, const std::string& scenario) {
  Recording rec = load_input(in, 250.0);
  std::string chain_note = "unfiltered";
  if (!scenario.empty()) {
    const FilterChain chain = scenario_chain(scenario_from_string(scenario),
                                             rec.sample_rate_hz, config.analysis.filter);
    rec = apply_chain(chain, rec);
    chain_note = "scenario " + scenario;
  }

  const auto skip = static_cast<std::size_t>(
      std::lround(config.analysis.discard_start_s * rec.sample_rate_hz));
  if (skip >= rec.samples.size()) throw DataError("recording shorter than discard interval");
  const std::span<const double> view(rec.samples.data() + skip, rec.samples.size() - skip);

  auto tau = static_cast<std::size_t>(
      std::lround(config.analysis.tau_seconds * rec.sample_rate_hz));
  tau = std::max<std::size_t>(tau, 2);
  const NoiseProfile profile = noise_profile(view, tau, config.analysis.sigma2_floor);
  const double wall = snr_wall(profile.rho);

  std::cout << "input           " << in.path << " (" << chain_note << ", tau = "
            << fmt(config.analysis.tau_seconds) << " s, " << profile.window_positions
            << " windows)\n"
            << "sigma2_min      " << fmt(profile.sigma2_min) << " uV^2\n"
            << "sigma2_max      " << fmt(profile.sigma2_max) << " uV^2\n"
            << "sigma2_nominal  " << fmt(profile.sigma2_nominal) << " uV^2\n"
            << "rho             " << fmt(profile.rho) << "\n"
            << "snr_wall        " << fmt(wall) << " ("
            << (wall > 0.0 ? fmt(to_db(wall), 4) : std::string("-inf")) << " dB)\n";
  return 0;
}

int run_analyze(const InputOptions& in, const InputOptions& p300, const RunConfig& config,
                const std::string& scenario, const std::string& domain,
                const std::string& out_csv) {
  RunConfig cfg = config;
  if (!domain.empty() && domain != "auto") {
    cfg.analysis.domain_override = domain_mode_from_string(domain);
  }

  Recording task = load_input(in, 250.0);
  task.task = std::filesystem::path(in.path).stem().string();
  const Recording ref = load_input(p300, task.sample_rate_hz);
  const auto epochs = slice_epochs(ref, cfg.analysis.epoch_pre_ms, cfg.analysis.epoch_post_ms);
  const auto pre = static_cast<std::size_t>(
      std::lround(cfg.analysis.epoch_pre_ms * 1e-3 * ref.sample_rate_hz));
  const EvokedPotential ep = evoked_average(epochs, pre, ref.sample_rate_hz);

  const AnalysisResult result =
      analyze_recording(task, ep, scenario_from_string(scenario), cfg.analysis);
  print_result(result);
  if (!out_csv.empty()) write_results_csv({result}, out_csv);
  return 0;
}

int run_study(const std::string& manifest_path, const RunConfig& config,
              const std::string& out_dir) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  std::vector<std::string> ingestion_notes;
  const Dataset dataset = load_dataset(manifest, &ingestion_notes);
  StudyResult study = run_study(dataset, config.scenarios, config.analysis, config.alpha);
  study.exclusions.insert(study.exclusions.begin(), ingestion_notes.begin(),
                          ingestion_notes.end());

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_results_csv(study.all_results, dir / "results.csv");
  write_summaries_csv(study.summaries, dir / "summaries.csv");
  const double rate = dataset.subjects.empty() || dataset.subjects[0].tasks.empty()
                          ? 250.0
                          : dataset.subjects[0].tasks[0].sample_rate_hz;
  write_run_json(config, study, rate, dir / "run.json");
  render_chart(study.summaries, dir / "chart.svg");

  std::cout << "task                 scen  n  mean_snr_db  mean_wall_db  t        p        "
               "significant\n";
  for (const auto& s : study.summaries) {
    std::printf("%-20s %-5s %-2zu %-12.2f %-13.2f %-8.3f %-8.4f %s\n", s.task.c_str(),
                to_string(s.scenario).c_str(), s.n_subjects, s.mean_snr_db, s.mean_wall_db,
                s.t_statistic, s.p_value,
                s.insufficient ? "insufficient" : (s.significant ? "yes" : "no"));
  }
  for (const auto& note : study.exclusions) std::cout << "excluded: " << note << "\n";
  std::cout << "outputs written to " << out_dir << " (results.csv, summaries.csv, run.json, "
            << "chart.svg)\n";
  return 0;
}

int run_simulate(std::uint64_t trials, std::uint64_t seed) {
  std::printf("Monte Carlo validation, %llu trials per case, seed %llu\n",
              static_cast<unsigned long long>(trials), static_cast<unsigned long long>(seed));
  std::printf("\n-- stationary detector vs analytic tails (SNR 0 dB under H1) --\n");
  std::printf("%-6s %-5s %-9s %-10s %-10s %-10s %-10s %-8s\n", "sigma2", "N", "gamma",
              "pfa_theory", "pfa_mc", "pd_theory", "pd_mc", "maxdiff");

  std::uint64_t stream = 0;
  double worst = 0.0;
  for (double sigma2 : {1.0, 4.0}) {
    for (std::size_t window : {32, 256}) {
      for (double z : {1.0, 1.2815515655, 2.0}) {
        const double n = static_cast<double>(window);
        const double gamma = sigma2 * (1.0 + std::sqrt(2.0 / n) * z);
        const double pfa_theory = p_false_alarm(gamma, sigma2, n);
        const double pd_theory = p_detection(gamma, sigma2, sigma2, n);
        const EmpiricalRates h0 = simulate_detector(HypothesisCase::null_case(), gamma,
                                                    window, trials, sigma2, seed + stream);
        const EmpiricalRates h1 =
            simulate_detector(HypothesisCase::signal_case(sigma2), gamma, window, trials,
                              sigma2, seed + stream + 1);
        stream += 2;
        const double diff = std::max(std::abs(h0.false_alarm_rate - pfa_theory),
                                     std::abs(h1.detection_rate - pd_theory));
        worst = std::max(worst, diff);
        std::printf("%-6.1f %-5zu %-9.5f %-10.5f %-10.5f %-10.5f %-10.5f %-8.5f\n", sigma2,
                    window, gamma, pfa_theory, h0.false_alarm_rate, pd_theory,
                    h1.detection_rate, diff);
      }
    }
  }
  std::printf("largest |analytic - empirical| deviation: %.5f\n", worst);

  std::printf("\n-- required samples, stationary (P_FA 0.1, P_D 0.9, SNR 0 dB) --\n");
  const DetectionTargets targets{0.1, 0.9};
  const SampleCount n_stat = required_samples_stationary(targets, 1.0);
  const double gamma30 =
      detection_threshold(targets.p_false_alarm, 1.0, static_cast<double>(n_stat.count));
  const EmpiricalRates h0s = simulate_detector(HypothesisCase::null_case(), gamma30,
                                               n_stat.count, trials, 1.0, seed + stream);
  const EmpiricalRates h1s = simulate_detector(HypothesisCase::signal_case(1.0), gamma30,
                                               n_stat.count, trials, 1.0, seed + stream + 1);
  stream += 2;
  std::printf("N = %llu (raw %.3f), gamma = %.5f -> empirical pfa %.4f, pd %.4f\n",
              static_cast<unsigned long long>(n_stat.count), n_stat.raw, gamma30,
              h0s.false_alarm_rate, h1s.detection_rate);

  std::printf("\n-- SNR-wall, rho = 2 (wall = 1.5 linear, %.2f dB) --\n", to_db(1.5));
  const double rho = 2.0;
  const double wall = snr_wall(rho);
  const auto n_exact = required_samples_robust_exact(targets, 2.0 * wall, rho);
  const double gamma_r = detection_threshold(targets.p_false_alarm, 1.0,
                                             static_cast<double>(n_exact->count), rho);
  const RatePair above = simulate_rate_pair(2.0 * wall, gamma_r, n_exact->count, trials, 1.0,
                                            seed + stream, rho);
  stream += 2;
  std::printf("SNR = 2x wall: exact robust N = %llu, gamma = %.5f -> pfa %.4f, pd %.4f\n",
              static_cast<unsigned long long>(n_exact->count), gamma_r, above.false_alarm_rate,
              above.detection_rate);

  const std::uint64_t roc_trials = std::max<std::uint64_t>(trials / 10, 1000);
  const auto roc = worst_case_roc(0.5 * wall, rho, 1.0, 1000, roc_trials, 200, seed + stream);
  double best_pd = 0.0;
  for (const auto& point : roc) {
    if (point.p_false_alarm <= 0.1) best_pd = std::max(best_pd, point.p_detection);
  }
  std::printf("SNR = 0.5x wall: over a 200-point gamma sweep at N = 1000, best P_D with "
              "P_FA <= 0.1 is %.4f (targets are unreachable below the wall)\n",
              best_pd);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SNR-wall analysis for EEG detectability under non-stationary noise"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  // filter
  auto* filter_cmd = app.add_subcommand("filter", "apply a scenario chain to a file");
  InputOptions filter_in;
  std::string filter_scenario = "A";
  std::string filter_out = "filtered.csv";
  std::string filter_chain_json;
  add_input_options(filter_cmd, &filter_in);
  filter_cmd->add_option("--scenario", filter_scenario, "A | B | C | D")->required();
  filter_cmd->add_option("-o,--output", filter_out, "output CSV path");
  filter_cmd->add_option("--chain-json", filter_chain_json, "write chain metadata JSON here");

  // wall
  auto* wall_cmd = app.add_subcommand("wall", "noise profile and SNR-wall of a file");
  InputOptions wall_in;
  std::string wall_scenario;
  double wall_tau = 0.0;
  add_input_options(wall_cmd, &wall_in);
  wall_cmd->add_option("--scenario", wall_scenario, "filter with this scenario first");
  wall_cmd->add_option("--tau", wall_tau, "sliding window length in seconds (default 1.0)");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "full per-recording detectability check");
  InputOptions analyze_in;
  InputOptions analyze_p300;
  std::string analyze_scenario;
  std::string analyze_domain = "auto";
  std::string analyze_out;
  double analyze_tau = 0.0;
  add_input_options(analyze_cmd, &analyze_in);
  analyze_cmd->add_option("--p300", analyze_p300.path, "P300 reference recording")->required();
  analyze_cmd->add_option("--p300-trigger-column", analyze_p300.trigger_col,
                          "trigger column of the reference (default 2)");
  analyze_cmd->add_option("--p300-trigger-file", analyze_p300.trigger_file,
                          "trigger index file for the reference");
  analyze_cmd->add_option("--scenario", analyze_scenario, "A | B | C | D")->required();
  analyze_cmd->add_option("--domain", analyze_domain, "time | frequency | auto");
  analyze_cmd->add_option("--tau", analyze_tau, "sliding window length in seconds");
  analyze_cmd->add_option("-o,--output", analyze_out, "write the result row as CSV");

  // study
  auto* study_cmd = app.add_subcommand("study", "manifest-driven tasks x scenarios run");
  std::string study_manifest;
  std::string study_out = "study-out";
  study_cmd->add_option("--manifest", study_manifest, "dataset manifest JSON")->required();
  study_cmd->add_option("-o,--output", study_out, "output directory");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo validation suite");
  std::uint64_t sim_trials = 20000;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--trials", sim_trials, "trials per case (default 20000)");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_run_config(config_path);
    if (wall_tau > 0.0) config.analysis.tau_seconds = wall_tau;
    if (analyze_tau > 0.0) config.analysis.tau_seconds = analyze_tau;

    if (filter_cmd->parsed()) {
      return run_filter(filter_in, config, filter_scenario, filter_out, filter_chain_json);
    }
    if (wall_cmd->parsed()) {
      return run_wall(wall_in, config, wall_scenario);
    }
    if (analyze_cmd->parsed()) {
      if (analyze_p300.trigger_col < 0 && analyze_p300.trigger_file.empty()) {
        analyze_p300.trigger_col = 2;
      }
      analyze_p300.unit = analyze_in.unit;
      analyze_p300.delimiter = analyze_in.delimiter;
      analyze_p300.sample_col = analyze_in.sample_col;
      analyze_p300.rate = analyze_in.rate;
      return run_analyze(analyze_in, analyze_p300, config, analyze_scenario, analyze_domain,
                         analyze_out);
    }
    if (study_cmd->parsed()) {
      return run_study(study_manifest, config, study_out);
    }
    if (sim_cmd->parsed()) {
      if (sim_trials < 1000) throw ConfigError("simulate needs at least 1000 trials");
      return run_simulate(sim_trials, sim_seed);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

// Writes the synthetic 6-subject cohort (TSV recordings + manifest.json)
// used to exercise the study pipeline end to end.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bciwall/synthetic_dataset.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate the synthetic study fixture"};
  std::string out_dir = "fixture";
  std::uint64_t seed = 20260809;
  std::size_t subjects = 6;
  app.add_option("output", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--subjects", subjects, "number of subjects");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    bciwall::SyntheticCohortConfig config;
    config.seed = seed;
    config.n_subjects = subjects;
    bciwall::write_synthetic_cohort(config, out_dir);
    std::cout << "wrote " << subjects << "-subject fixture to " << out_dir
              << " (manifest.json + TSV recordings)\n";
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

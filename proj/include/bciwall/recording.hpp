#ifndef BCIWALL_RECORDING_HPP
#define BCIWALL_RECORDING_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace bciwall {

// A uniformly sampled single-channel time series. Samples are stored in
// microvolts regardless of the unit of the source file.
struct Recording {
  std::vector<double> samples;           // uV
  double sample_rate_hz = 0.0;
  std::string subject;
  std::string task;
  std::string channel;
  std::vector<std::size_t> triggers;     // stimulus onsets (sample indices)

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Throws ConfigError / DataError if the recording violates its invariants
// (sample count >= 1, rate > 0, all samples finite).
void validate(const Recording& rec);

}  // namespace bciwall

#endif

#ifndef BCIWALL_ERRORS_HPP
#define BCIWALL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bciwall {

// Invalid parameters or configuration (bad band edges, rho < 1, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Data that fails quality checks (degenerate noise, ragged trials, NaN samples).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File-level failures, always carrying path context in the message.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bciwall

#endif

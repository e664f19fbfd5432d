#pragma once

#include <stdexcept>
#include <string>

namespace d2dra {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration, flags, or inconsistent inputs. CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// User placement radii inconsistent with the area; surfaces as a config problem.
struct PlacementError : ConfigError {
  using ConfigError::ConfigError;
};

// File read/write/parse failures. CLI exit code 3.
struct IoError : Error {
  using Error::Error;
};

// Non-finite loss during training. CLI exit code 4.
struct TrainingDivergedError : Error {
  using Error::Error;
};

// Grid search would exceed the configured evaluation budget. CLI exit code 5.
struct BudgetExceededError : Error {
  using Error::Error;
};

}  // namespace d2dra

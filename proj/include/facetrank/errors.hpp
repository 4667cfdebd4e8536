#pragma once

#include <stdexcept>
#include <string>

namespace facetrank {

// Bad command line, bad run config file, contradictory settings.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (taxonomy, venues, ratings, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace facetrank

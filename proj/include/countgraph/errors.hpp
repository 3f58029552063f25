#pragma once

#include <stdexcept>

namespace countgraph {

// Error taxonomy used by the CLI exit-code mapping:
//   IoError    -> 2  (malformed or unreadable input)
//   DataError  -> 3  (data violates model/support constraints)
//   UsageError -> 2  (contract violation on user-facing parameters)
// anything else -> 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace countgraph

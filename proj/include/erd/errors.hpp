#pragma once

#include <stdexcept>
#include <string>

namespace erd {

// Error taxonomy used across the library:
//   ShapeError    - dimension mismatch between tensors / layers
//   ArgumentError - a call-contract violation (empty sequence, bad factor, ...)
//   ParseError    - malformed input file; message carries file/line context
//   NumericError  - a non-finite value surfaced where finiteness is required

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace erd

#pragma once

#include <stdexcept>
#include <string>

namespace nterm {

// Malformed input text: space strings, weight strings, CSV rows, flags.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter outside its admissible range, or a family/space mismatch.
struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sequence index universe does not match the space.
struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration cap exceeded or a request that is infeasible at this scale.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate, integer overflow, table lookup out of range.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nterm

#pragma once

#include <stdexcept>
#include <string>

namespace zfnv {

/// Invalid parameter or malformed input (bad spin number, negative distance, ...).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical invariant (trace, hermiticity, unitarity) broke during a computation.
class NumericalInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sweep has no interior minimum.
class NoResonanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zfnv

#pragma once

#include <stdexcept>
#include <string>

namespace relugf {

/// Raised when an operation that only supports one-dimensional inputs is
/// handed a network with d != 1 (or a shape mismatch in general).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Neuron index outside [0, H).
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Two ladder rungs lie within the classification tolerance.
class AmbiguousClassification : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relugf

#pragma once

#include <stdexcept>
#include <string>

namespace fkwc {

// Error taxonomy shared by the library and the command-line front end.
// Each category maps to its own CLI exit code.

/// Malformed or inconsistent input data (files, rows, cells, labels).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument values.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Curves that do not share a grid, or vectors of mismatched length.
class DimensionError : public ParameterError {
public:
  using ParameterError::ParameterError;
};

/// A numerical routine failed (factorization, non-convergence, normalization).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fkwc

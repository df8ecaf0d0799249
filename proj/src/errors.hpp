#pragma once

#include <stdexcept>

namespace mtcs {

// Incompatible tensor/matrix dimensions.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// File or directory level failures (missing file, bad magic, short read).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures of the numerics themselves (SVD non-convergence, singular
// sensing draws, ill-conditioned blocks).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mtcs

#pragma once

#include <stdexcept>

namespace pbo {

/// Requested exact computation is not available for the given inputs.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical postcondition (residual, bracket) failed.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pbo

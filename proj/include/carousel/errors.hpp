#pragma once

#include <stdexcept>
#include <string>

namespace carousel {

// Base class for runtime numeric failures. The CLI maps these to exit code 2.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndeterminateClassification : NumericError {
  using NumericError::NumericError;
};
struct WindingGuardExceeded : NumericError {
  using NumericError::NumericError;
};
struct TruncationNotConverged : NumericError {
  using NumericError::NumericError;
};
struct DivergentNorm : NumericError {
  using NumericError::NumericError;
};
struct DegenerateBoundaryConditions : NumericError {
  using NumericError::NumericError;
};
struct DegenerateMeasure : NumericError {
  using NumericError::NumericError;
};
struct RootCountMismatch : NumericError {
  using NumericError::NumericError;
};
struct DenominatorBlowup : NumericError {
  using NumericError::NumericError;
};
struct RejectionStall : NumericError {
  using NumericError::NumericError;
};
struct HorizonTooShort : NumericError {
  using NumericError::NumericError;
};
struct WindowMismatch : NumericError {
  using NumericError::NumericError;
};

}  // namespace carousel

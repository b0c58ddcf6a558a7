#ifndef MOURREKIT_ERRORS_HPP
#define MOURREKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mourre {

// Base class for all library errors. Validation errors (bad inputs,
// incompatible grids) and numerical failures derive from it separately so
// callers can map them to distinct exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

// grid
struct NonCommensurate : ValidationError {
  using ValidationError::ValidationError;
};
struct TooCoarse : ValidationError {
  using ValidationError::ValidationError;
};

// operators
struct ComplexPotential : ValidationError {
  using ValidationError::ValidationError;
};
struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct TooLargeForDense : ValidationError {
  using ValidationError::ValidationError;
};

// symbolic
struct SyntaxError : ValidationError {
  SyntaxError(const std::string& what, std::size_t position)
      : ValidationError(what + " at position " + std::to_string(position)),
        pos(position) {}
  std::size_t pos;
};
struct UnknownSymbol : ValidationError {
  using ValidationError::ValidationError;
};
struct UnboundFunction : ValidationError {
  using ValidationError::ValidationError;
};

// mourre
struct WindowOutsideI : ValidationError {
  using ValidationError::ValidationError;
};
struct ResolutionTooCoarse : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyWindow : NumericalError {
  using NumericalError::NumericalError;
};

// lap
struct NearSpectrumSingular : NumericalError {
  using NumericalError::NumericalError;
};
struct SolveResidualTooLarge : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace mourre

#endif

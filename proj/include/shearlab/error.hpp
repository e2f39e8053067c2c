#pragma once

#include <stdexcept>
#include <string>

namespace shearlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad gluing tables, wrong vector sizes,
/// incomplete shears where completeness is required, unknown identifiers.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The input is well formed but the requested geometric quantity does not
/// exist (non-hyperbolic element, degenerate development, points out of order).
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace shearlab

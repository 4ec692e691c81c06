#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point was evaluated outside the closure of the domain.
class DomainMembershipError : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for this kind of domain.
class UnsupportedKindError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or invalid geometric input.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Facial layers of a polygon overlap (depth at or beyond the inradius).
class LayerOverlapError : public Error {
 public:
  using Error::Error;
};

/// A singular weight was requested on the boundary.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Mesh or quadrature resolution insufficient for the request.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Parameter value at which the quantity is undefined (e.g. delta = 1).
class ExceptionalValueError : public Error {
 public:
  using Error::Error;
};

/// Configuration or argument validation failure.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An experimental protocol produced inconsistent classifications.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Iterative method did not reach its tolerance.
class IterativeFailure : public Error {
 public:
  IterativeFailure(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace hardy

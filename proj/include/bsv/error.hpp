#pragma once

#include <stdexcept>
#include <string>

namespace bsv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Mesh connectivity or geometry that an operation cannot handle
/// (non-manifold edges, open meshes where a closed one is needed, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// File parsing / writing failures.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The registration loop could not continue (singular system, NaN positions).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}
  explicit SolverError(const std::string& what) : Error(what), iteration_(-1) {}

  /// Outer iteration at which the failure happened, -1 outside the loop.
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace bsv

#pragma once

#include <stdexcept>
#include <string>

namespace acagp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Collinear points, zero direction vectors and similar geometric failures.
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// Kernel evaluated at (numerically) coincident points.
class SingularEvaluation : public Error {
public:
  using Error::Error;
};

/// A dense operation was requested above its configured size cap.
class CapExceeded : public Error {
public:
  using Error::Error;
};

/// Malformed file or configuration input.
class InputError : public Error {
public:
  using Error::Error;
};

} // namespace acagp

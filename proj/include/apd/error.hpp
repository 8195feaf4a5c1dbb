#ifndef APD_ERROR_HPP
#define APD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace apd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discriminant mismatch, division by zero.
class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: rule files, pattern files, cocycle specs, exact-scalar text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A quantity needs a larger window than the sample provides.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// A shape cocycle cannot be realized (non-positive length, closure violation).
class InadmissibleError : public Error {
 public:
  using Error::Error;
};

/// Any other violated precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace apd

#endif  // APD_ERROR_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace bagcv {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's domain (h <= 0, m > n, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Optimizer, quadrature or fitting failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Bad input data: unparsable rows, too few observations.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (unknown preset, malformed study spec).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bagcv

#pragma once

#include <stdexcept>
#include <string>

namespace fkd {

// Base class so callers can catch every library failure in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (negative x, singular quotient).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Argument outside the validated range (order too large, N unsupported).
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class InvalidModeError : public Error {
 public:
  using Error::Error;
};

class DegenerateDomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

class IndefiniteOperatorError : public Error {
 public:
  using Error::Error;
};

class IllConditionedFitError : public Error {
 public:
  using Error::Error;
};

class InvalidProfileError : public Error {
 public:
  using Error::Error;
};

// Malformed command line or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace fkd

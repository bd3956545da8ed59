#pragma once

#include <stdexcept>
#include <string>

namespace flockcert {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exponential moment (or K) was requested outside its convergence domain.
class DivergentMoment : public Error {
 public:
  using Error::Error;
};

class InvalidOrder : public Error {
 public:
  using Error::Error;
};

class NegativeDistance : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain where the quantity is defined.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed distribution literal, axis spec or similar user input.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

/// A history query fell outside the stored trajectory. Indicates a bug in the
/// integrator, never a user error.
class HistoryUnderflow : public Error {
 public:
  using Error::Error;
};

class DegenerateWindow : public Error {
 public:
  using Error::Error;
};

}  // namespace flockcert

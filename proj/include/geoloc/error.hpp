#pragma once

#include <stdexcept>
#include <string>

namespace geoloc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or invariant (bad topology, bad
// arguments, malformed file contents).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text; the message carries the location (line, field).
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Latency outside the domain of a fitted latency model.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Geometric configuration without a unique answer, e.g. concentric circles of
// equal radius.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public FitError {
 public:
  using FitError::FitError;
};

}  // namespace geoloc

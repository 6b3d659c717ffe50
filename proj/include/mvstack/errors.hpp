#pragma once

#include <stdexcept>
#include <string>

namespace mvstack {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or column-count mismatches.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid view labels (non-positive, non-integer).
class LabelError : public Error {
 public:
  using Error::Error;
};

// A sub-view straddles two parent views.
class NestingError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (fold counts, alphas, unknown options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite values where finite input is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Iteratively reweighted solve blew up (non-finite state).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Data admits no fit (all-constant design, single-class outcome).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A cross-validation fold lost one of the outcome classes.
class StratificationError : public Error {
 public:
  using Error::Error;
};

// Missing values present while the missing-data action forbids them.
class MissingDataError : public Error {
 public:
  using Error::Error;
};

// Too little usable data after restrictions.
class DataError : public Error {
 public:
  using Error::Error;
};

// Imputation impossible (e.g. a fully missing column).
class ImputeError : public Error {
 public:
  using Error::Error;
};

// Malformed text input.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Model file written by an unknown future format version.
class VersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvstack

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace narkoop {

/// Base class for every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an API precondition (wrong dimensions, invalid
/// arguments, out-of-range ranks).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A requested dictionary or table would exceed a configured size cap.
class CapacityError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Input data cannot support the requested operation.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A series is too short for the requested window or pairing.
class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

/// Input is structurally valid but carries no usable signal (all zero, ...).
class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};

/// The requested error metric is undefined for the given reference signal.
class UndefinedMetricError : public DataError {
 public:
  using DataError::DataError;
};

/// A file could not be parsed. row/col are 1-based when known, 0 otherwise.
class ParseError : public DataError {
 public:
  explicit ParseError(const std::string& what, std::size_t row = 0, std::size_t col = 0)
      : DataError(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// A persisted artifact was written by an incompatible format version.
class VersionError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failure inside an algorithm (e.g. SVD non-convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A rollout produced a non-finite value at prediction `step` (1-based).
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : NumericalError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace narkoop

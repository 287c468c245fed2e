#ifndef ROLLBOT_ERRORS_HPP
#define ROLLBOT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rollbot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The 2x2 mass matrix is (numerically) singular; the plant parameters are non-physical.
class SingularMassMatrix : public Error {
 public:
  using Error::Error;
};

class NonPositiveWidth : public Error {
 public:
  using Error::Error;
};

/// Every rule firing exponent is non-finite, so no normalized firing exists.
class DegenerateFiring : public Error {
 public:
  using Error::Error;
};

/// All membership centers coincide with the current input.
class DegenerateDistance : public Error {
 public:
  using Error::Error;
};

/// The learning rate does not dominate the torque-derivative bound.
class ConditionViolated : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class SegmentTooShort : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A rollout aborted; carries the index of the row being produced.
class SimulationError : public Error {
 public:
  SimulationError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace rollbot

#endif  // ROLLBOT_ERRORS_HPP

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rhodec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A joint observation has zero prior probability under the current belief.
class ImpossibleObservation : public Error {
 public:
  explicit ImpossibleObservation(std::size_t step)
      : Error("observation at history step " + std::to_string(step) +
              " has zero probability"),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Enumeration would exceed the configured cap.
class CombinatorialLimit : public Error {
 public:
  CombinatorialLimit(const std::string& what, std::string count)
      : Error(what + " (count " + count + ")"), count_(std::move(count)) {}
  const std::string& count() const { return count_; }

 private:
  std::string count_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidBelief : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SyntaxError : public InvalidArgument {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : InvalidArgument("line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class StochasticityError : public InvalidArgument {
 public:
  StochasticityError(const std::string& row, double residual)
      : InvalidArgument("row " + row + " does not sum to 1 (residual " +
                        std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class InsufficientData : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace rhodec

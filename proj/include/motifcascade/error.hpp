#pragma once

#include <stdexcept>
#include <string>

namespace motifcascade {

// Error categories map onto the CLI exit codes.
enum class ErrorKind { config = 2, data = 3, numerical = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// Malformed line in an input file.
class IngestionError : public DataError {
 public:
  IngestionError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CascadeTooShort : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

// Argument outside the mathematical domain of a function.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LikelihoodUndefined : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GeneratorStarved : public Error {
 public:
  explicit GeneratorStarved(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

}  // namespace motifcascade

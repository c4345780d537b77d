#pragma once

#include <stdexcept>
#include <string>

namespace mcr {

enum class ErrorKind { validation, dimension, numerical, stability, io };

/// Base for every error the library raises. The kind drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::dimension, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Raised when Q is singular or too ill-conditioned to solve.
class RankDeficiencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StabilityError : public Error {
 public:
  StabilityError(int t, const std::string& what) : Error(ErrorKind::stability, what), time_(t) {}
  int time() const noexcept { return time_; }

 private:
  int time_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace mcr

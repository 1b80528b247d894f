#pragma once

#include <stdexcept>
#include <string>

namespace oven {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: violated precondition or invariant of a domain type.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Configuration file problems. Carries the offending key path and, when
// known, the 1-based line number in the source file.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, std::string message, int line = 0);

  const std::string& key_path() const noexcept { return key_path_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_path_;
  int line_;
};

// Failures of a numerical procedure (as opposed to bad input). The CLI maps
// these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class BandOutsideTrappedRegime : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AboveCutoff : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NumericalBlowup : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PeakOverlap : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DisjointDomains : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnstableTimestep : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyProfile : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class GridMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace oven

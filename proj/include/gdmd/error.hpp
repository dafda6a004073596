#pragma once

#include <stdexcept>
#include <string>

namespace gdmd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes or arguments was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Input carries no information (all-zero matrix or tensor).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Every eigenvalue was discarded; no spectrum left to report.
class EmptySpectrum : public Error {
 public:
  using Error::Error;
};

/// Malformed file, config or roster.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A synthetic generator configuration cannot be realized.
class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace gdmd

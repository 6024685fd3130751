#pragma once

#include <stdexcept>
#include <string>

namespace phasehpss {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto its exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Operand shapes (lengths, bins, frames) disagree.
class ShapeError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class IoError : public Error {
public:
  using Error::Error;
};

class FormatError : public IoError {
public:
  using IoError::IoError;
};

class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

private:
  int iteration_;
};

} // namespace phasehpss

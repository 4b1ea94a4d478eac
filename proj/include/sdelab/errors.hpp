#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdelab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument failed (empty interval, zero direction, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument lies outside the mathematical domain of the quantity.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its requested tolerance.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

/// A solver produced a non-finite state.
class ExplosionError : public Error {
 public:
  ExplosionError(std::size_t step, const std::string& what)
      : Error(what + " (first non-finite state at step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Monte Carlo estimation could not produce a single usable sample.
class EstimationFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace sdelab

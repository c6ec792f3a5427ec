#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace projflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class MeshError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// A linear solve that did not meet its residual contract.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (relative residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// A time step that could not be completed.
class StepFailure : public Error {
public:
  StepFailure(int step, double t, const std::string& what)
      : Error("step " + std::to_string(step) + " (t = " + std::to_string(t) + "): " + what),
        step_(step),
        t_(t) {}
  int step() const noexcept { return step_; }
  double time() const noexcept { return t_; }

private:
  int step_;
  double t_;
};

/// A discrete identity or invariant of the scheme failed its gate.
class IdentityViolation : public StepFailure {
public:
  using StepFailure::StepFailure;
};

}  // namespace projflow

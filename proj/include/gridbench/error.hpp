#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line (0 when unknown) and the
/// field path that failed to parse.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line, std::string field)
      : Error(format(message, line, field)), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& message, std::size_t line, const std::string& field) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " (" + field + ")";
    return out + ": " + message;
  }

  std::size_t line_;
  std::string field_;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Newton-Raphson failure: non-convergence or singular Jacobian.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string message, int iterations, double mismatch_norm)
      : Error(std::move(message)), iterations_(iterations), mismatch_norm_(mismatch_norm) {}

  int iterations() const noexcept { return iterations_; }
  double mismatch_norm() const noexcept { return mismatch_norm_; }

 private:
  int iterations_;
  double mismatch_norm_;
};

/// File-system failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridbench

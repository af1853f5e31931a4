#pragma once

#include <stdexcept>
#include <string>

namespace mafd {

/// Invalid configuration: a violated invariant on SystemConfig, SwarmConfig or
/// an ExperimentSpec. The message names the invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// The UL channel matrix is (numerically) rank deficient, so no ZF receiver exists.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& message, double condition_number)
      : std::runtime_error(message), condition_number_(condition_number) {}

  double condition_number() const { return condition_number_; }

 private:
  double condition_number_;
};

/// A precondition on numeric input was violated (e.g. a non-Hermitian matrix).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mafd

#pragma once

#include <stdexcept>
#include <string>

namespace bmlab {

// Invalid argument / precondition violation.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Path step too coarse for the requested scale.
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature failed to reach the requested tolerance.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error bound " + std::to_string(achieved) +
                           ")"),
        achieved_error(achieved) {}
  double achieved_error;
};

// Fit impossible (e.g. all-zero hit counts).
class DegenerateFitError : public std::runtime_error {
 public:
  explicit DegenerateFitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bmlab

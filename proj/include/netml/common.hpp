#pragma once

// Shared error types and numeric conventions used across the library.
//
// All probability-valued inputs are validated at API boundaries; divergence
// computations that would be infinite raise DivergenceInfiniteError instead
// of silently returning IEEE infinity, so callers can distinguish "model
// assigns probability zero to an observed value" from overflow bugs.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace netml {

// Absolute tolerance under which two probabilities are considered equal when
// deciding whether a divergence term is 0 (p == q) or infinite (p != q at a
// boundary).
inline constexpr double kEqTol = 1e-12;

// Hard cap on exhaustive labeling enumeration: k^n must not exceed this.
inline constexpr double kEnumerationBudget = 2e6;

// Raised when a Bernoulli divergence term is +infinity: the second argument
// is 0 or 1 while the first differs.  Carries the offending pair when the
// term arises inside a matrix sum.
class DivergenceInfiniteError : public std::runtime_error {
 public:
  explicit DivergenceInfiniteError(const std::string& what)
      : std::runtime_error(what) {}
};

// Raised when an exhaustive search would exceed kEnumerationBudget.
class EnumerationBudgetError : public std::runtime_error {
 public:
  explicit EnumerationBudgetError(const std::string& what)
      : std::runtime_error(what) {}
};

// Raised when an edge-density estimate comes out identically zero, so the
// derived clamp interval would be empty.
class DegenerateSampleError : public std::runtime_error {
 public:
  explicit DegenerateSampleError(const std::string& what)
      : std::runtime_error(what) {}
};

// Raised on malformed experiment/CLI configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace netml

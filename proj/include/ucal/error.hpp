#pragma once

#include <stdexcept>
#include <string>

namespace ucal {

// Raised for malformed inputs: bad probabilities, arity mismatches,
// non-concave rules, divisibility requirements of fixtures.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when the LP solver cannot produce an optimal table.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ucal

#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace mltp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A tensor or table failed the associativity check. `witness` holds the
/// worst-violating index tuple (i, j, k, p) (0-based; p is unused for tables).
class AssociativityViolation : public Error {
 public:
  AssociativityViolation(const std::string& what, std::array<std::size_t, 4> witness, double defect)
      : Error(what), witness(witness), defect(defect) {}
  std::array<std::size_t, 4> witness;
  double defect;
};

/// A theorem's hypothesis does not hold for the supplied data.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// A series or iteration did not reach its stopping criterion.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same quantity disagree.
class ConsistencyFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace mltp

#ifndef SPATH_ERRORS_HPP
#define SPATH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spath {

/// Invalid or inconsistent input data (bad records, malformed CSV, ...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: divergent integral, non-convergent quadrature,
/// degenerate weight system.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A combinatorial object violates one of its structural constraints.
class ConstraintError : public std::invalid_argument {
 public:
  ConstraintError(const std::string& what, int index)
      : std::invalid_argument(what), index_(index) {}
  /// First index at which the constraint fails.
  int index() const { return index_; }

 private:
  int index_;
};

}  // namespace spath

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace supertrees {

/// Raised when an operation's input violates its documented precondition.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical procedure (quadrature, extrapolation) failed to reach its tolerance.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested object does not exist, e.g. a partition function or a
/// coefficient that is zero at the requested size.
class degenerate_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A truncated infinite sum could not be certified within tolerance.
class truncation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw precondition_error(message);
}

}  // namespace detail
}  // namespace supertrees

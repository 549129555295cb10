#pragma once

#include <stdexcept>
#include <string>

namespace spherefield {

// Input outside the mathematical domain of an operation (bad degree,
// abscissa, lag, parameter range...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A request that exceeds a documented budget (degree cap, dense
// factorization size).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: factorization breakdown, quadrature non-convergence,
// degenerate linear systems.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spherefield

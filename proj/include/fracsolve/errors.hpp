#ifndef FRACSOLVE_ERRORS_HPP
#define FRACSOLVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fracsolve {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Gamma function evaluated at a non-positive integer.
class PoleError : public Error {
public:
  using Error::Error;
};

/// Inputs violate a mathematical precondition (convergence index, domain of z, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A series, quadrature or iteration did not reach the requested tolerance.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// The problem lies outside every regime for which a closed-form solution is known
/// (boundary orders such as alpha == m, or sign conditions that fail).
class UnsupportedRegime : public Error {
public:
  using Error::Error;
};

} // namespace fracsolve

#endif // FRACSOLVE_ERRORS_HPP

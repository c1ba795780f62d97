#pragma once

#include <stdexcept>
#include <string>

namespace minl2 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (grid point <= T, t < 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A weight or integrand returned a value violating its contract.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The declared tail bound does not control the truncated remainder.
class TailBoundError : public Error {
 public:
  using Error::Error;
};

/// Two successive quadrature resolutions disagree beyond tolerance.
class RefinementError : public Error {
 public:
  using Error::Error;
};

/// A quantity that must stay positive (or nonzero) did not.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A theorem's hypothesis failed numerically; the check refuses to conclude.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace minl2

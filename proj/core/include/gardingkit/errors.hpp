#pragma once

#include <stdexcept>

namespace gk {

/// Base class for all library errors.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad argument: dimension < 2, order out of range, unsorted input, ...
class InvalidInput : public Error {
  using Error::Error;
};

/// A required sigma denominator vanished.
class DivisionDegeneracy : public Error {
  using Error::Error;
};

/// The point lies outside the cone a formula requires.
class ConeViolation : public Error {
  using Error::Error;
};

/// Rejection sampler hit its retry cap; the stratum is empirically empty.
class SamplerExhausted : public Error {
  using Error::Error;
};

/// Height field violates u > 0 at an interior node.
class DomainViolation : public Error {
  using Error::Error;
};

/// Radial profile with r = 0 but u'(0) != 0.
class SymmetryViolation : public Error {
  using Error::Error;
};

/// Fewer converged profiles than a schedule-level report needs.
class InsufficientData : public Error {
  using Error::Error;
};

/// Malformed CSV or JSON input.
class FormatError : public Error {
  using Error::Error;
};

}  // namespace gk

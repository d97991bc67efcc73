#pragma once

#include <stdexcept>
#include <string>

namespace gmsfp {

/// Base of every error the library throws for unusable input or a failed
/// hypothesis. Verdicts (a condition that does not hold) are reported as data,
/// never thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distance table is not square, has negative or NaN entries, or does not
/// match the point list.
class MalformedTable : public Error {
 public:
  using Error::Error;
};

/// Any other structurally invalid input (bad JSON shape, bad map table, ...).
class MalformedInput : public Error {
 public:
  using Error::Error;
};

class UnknownPoint : public Error {
 public:
  using Error::Error;
};

/// a1 + a2 + a3 >= 1, or a negative coefficient.
class CoefficientError : public Error {
 public:
  using Error::Error;
};

/// A x_n fell outside the domain of the right-inverse chosen for B.
class SelectorFailure : public Error {
 public:
  using Error::Error;
};

class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class StateSetMismatch : public Error {
 public:
  using Error::Error;
};

/// The a-priori bound on O w failed; indicates a fault in apply_T/apply_O.
class BoundednessViolation : public Error {
 public:
  using Error::Error;
};

class GenerationExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace gmsfp

#pragma once

#include <stdexcept>
#include <string>

namespace eoflab {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension exceeds the configured cap, or an index/size is out of range.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A FactorLayout is inconsistent with the state it is applied to.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// A vector that must be unit norm is not.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// An operator that must be positive semidefinite has an eigenvalue below
/// the hard floor.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// An operator that must be Hermitian is not, entrywise.
class HermiticityError : public Error {
 public:
  using Error::Error;
};

/// A density operator trace deviates from 1 beyond tolerance.
class TraceError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument violates an operation precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Declared constraint sums of a decomposition family are not satisfied.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Two vectors that must be linearly independent are (numerically) parallel,
/// or a combination direction vanishes.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// An ensemble member is not supported inside the support of the mixture.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// An operation that requires a passing pair certificate was given a
/// failing one.
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// A state file could not be parsed or violates a state invariant.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace eoflab

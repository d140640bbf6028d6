#pragma once

#include <stdexcept>
#include <string>

namespace otsuki {

// Validation-class failures map to CLI exit code 1, numerical ones to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller supplied inconsistent or inadmissible input.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Quadrature, ODE, or linear algebra failed to meet its tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An eigenvalue sits too close to the zero-classification boundary and
/// moves across it under mesh refinement.
class AmbiguityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The Dirichlet problem has a (near) zero eigenvalue, so boundary-form
/// counting does not apply.
class InapplicableError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Two independent routes produced different counts.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace otsuki

#pragma once

#include <stdexcept>
#include <string>

namespace cubicpcf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input or violated precondition.
class UsageError : public Error {
public:
    using Error::Error;
};

/// An exact computation outgrew its configured resource budget
/// (bit size, iteration horizon, degree cap).
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// A numerical target could not be met (tolerance, precision, convergence).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Truncated series lost all significant terms.
class PrecisionExhausted : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Evaluation point lies outside the region where the result is valid.
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A relation polynomial vanishes identically on the curve under study
/// (the marked critical point is persistently preperiodic there).
class IdenticallyZero : public Error {
public:
    using Error::Error;
};

}  // namespace cubicpcf

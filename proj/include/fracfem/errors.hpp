#pragma once

#include <stdexcept>
#include <string>

namespace fracfem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where an operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quadrature evaluation produced a non-finite value or failed to converge.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Dense LU factorization met a pivot below the singularity threshold.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// A manufactured problem does not satisfy its own equation or boundary conditions.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (unknown key, out-of-range value, bad combination).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fracfem

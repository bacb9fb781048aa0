#pragma once

#include <stdexcept>
#include <string>

namespace vkshell {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid too small for a stencil, or an invalid grid description.
class SizingError : public Error {
public:
    using Error::Error;
};

/// Fields living on different grids were combined.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed growth specification (degree bound, non-finite coefficient).
class SpecError : public Error {
public:
    using Error::Error;
};

/// Input rejected by a precondition (ellipticity, invertibility, shallowness).
class InputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failure; carries the last residual.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace vkshell

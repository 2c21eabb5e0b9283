#ifndef DGCN_ERROR_HPP_
#define DGCN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dgcn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file (message carries the line number).
struct ParseError : Error {
    using Error::Error;
};

/// A contract violation in user-supplied data or configuration.
struct ValidationError : Error {
    using Error::Error;
};

/// An iterative method failed to reach its tolerance.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;
};

/// Dimension mismatch between matrix operands.
struct ShapeError : Error {
    using Error::Error;
};

/// Non-finite value encountered where finiteness is an invariant.
struct NumericError : Error {
    using Error::Error;
};

} // namespace dgcn

#endif // DGCN_ERROR_HPP_

#pragma once

#include <stdexcept>
#include <string>

#include "moreau/vec.hpp"

namespace moreau {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed inputs: degenerate regions, broken config files, bad file paths.
struct ConfigError : Error {
    using Error::Error;
};

/// A numeric parameter violates its admissible range (e.g. lambda*rho < 1,
/// sigma < 2/L^2). The message names the violated inequality.
struct ParameterError : Error {
    using Error::Error;
};

/// The step-size sequences violate 0 < lambda_bar < 2*gamma_k < lambda_k < 1/rho.
struct ScheduleError : Error {
    using Error::Error;
};

/// A problem instance misbehaved (non-finite value or subgradient on its region).
struct InstanceError : Error {
    using Error::Error;
};

/// A documented call precondition does not hold (e.g. x0 outside B[x_bar, beta]).
struct PreconditionError : Error {
    using Error::Error;
};

struct UnsupportedDimensionError : Error {
    using Error::Error;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
/// Carries the best point seen and its residual.
struct NonconvergenceError : Error {
    NonconvergenceError(const std::string& msg, Vec best_point, double best_residual)
        : Error(msg), best(std::move(best_point)), residual(best_residual) {}
    Vec best;
    double residual;
};

/// An iterate left the ball the analysis confines it to; signals that the
/// locality radii (beta, delta) are misconfigured for the instance.
struct LocalityError : Error {
    using Error::Error;
};

}  // namespace moreau

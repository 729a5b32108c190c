#pragma once

#include <stdexcept>
#include <string>

namespace symflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was not met (bad shape, non-finite data, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Checkpoint file could not be read or does not follow the binary layout.
class FormatError : public Error {
public:
    using Error::Error;
};

/// The advective stability bound dt <= cfl * dx / max|u| was violated.
class CflViolation : public Error {
public:
    CflViolation(double t, double max_speed, double dt_limit)
        : Error("CFL violation at t=" + std::to_string(t) + ": max|u|=" + std::to_string(max_speed) +
                " allows dt <= " + std::to_string(dt_limit)),
          t(t), max_speed(max_speed), dt_limit(dt_limit) {}
    double t;
    double max_speed;
    double dt_limit;
};

/// Non-finite coefficients appeared during time integration.
class BlowUp : public Error {
public:
    explicit BlowUp(double t) : Error("non-finite coefficients at t=" + std::to_string(t)), t(t) {}
    double t;
};

/// Inviscid run lost resolution (enstrophy grew past the guard factor).
class ResolutionLoss : public Error {
public:
    ResolutionLoss(double t, double growth)
        : Error("resolution lost at t=" + std::to_string(t) + ": enstrophy grew by " + std::to_string(growth)),
          t(t), growth(growth) {}
    double t;
    double growth;
};

} // namespace symflow

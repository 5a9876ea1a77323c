#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sweep {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base of every error raised by the library. The message names the
/// operation that failed.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed problem data or a violated standing assumption.
class ProblemError : public Error {
public:
    using Error::Error;
};

/// Penalty exponent above the double-precision guard.
class PenaltyOverflow : public Error {
public:
    PenaltyOverflow(const std::string& what, double exponent)
        : Error(what), exponent_(exponent) {}
    double exponent() const { return exponent_; }

private:
    double exponent_;
};

/// Step-size underflow or a failed precondition inside an integrator.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double t) : Error(what), t_(t) {}
    double time() const { return t_; }

private:
    double t_;
};

class ProjectionError : public Error {
public:
    using Error::Error;
};

/// Bad user configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace sweep

#pragma once

#include <stdexcept>
#include <string>

namespace insider {

// Malformed inputs: bad coefficients, thresholds, grids, configs.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A time argument outside [0, 1].
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation at a time where the remaining variance rho - tau vanishes.
class SingularTimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Adaptive quadrature ran out of its panel budget. The partial result and its
// error estimate are kept so callers can report them.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial, double error_estimate)
        : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}

    double partial() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_;
    double error_estimate_;
};

// Monte Carlo run aborted because too many paths produced non-finite wealth.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace insider

#pragma once

#include <stdexcept>
#include <string>

namespace rubs {

// Invalid arguments or geometry that cannot be realized.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Target covariance lies outside the reachable set. bound() is U(theta) of the
// target orientation (infinite at principal directions, NaN if the target was
// not positive definite).
class Infeasible : public DomainError {
public:
    Infeasible(const std::string& what, double rho, double theta, double bound)
        : DomainError(what), rho_(rho), theta_(theta), bound_(bound) {}
    double rho() const noexcept { return rho_; }
    double theta() const noexcept { return theta_; }
    double bound() const noexcept { return bound_; }

private:
    double rho_, theta_, bound_;
};

class OutOfGrid : public DomainError {
public:
    using DomainError::DomainError;
};

class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rubs

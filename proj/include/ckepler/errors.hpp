#pragma once

#include <stdexcept>
#include <string>

namespace ckepler {

/// Argument outside the domain of a function (non-finite input, out-of-range radius, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Tan_k evaluated at a pole. Carries the sign of the infinity approached.
class PoleError : public DomainError {
public:
    PoleError(const std::string& what, int sign) : DomainError(what), sign_(sign) {}
    int sign() const noexcept { return sign_; }

private:
    int sign_;
};

/// Evaluation at the force center r = 0 (or the antipode on the sphere).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Requested (E, J) pair or conic parameters cannot be realized.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical procedure failed (step-size underflow, quadrature breakdown).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ckepler

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qkzb {

using cplx = std::complex<double>;

// Bad argument: out-of-range index, wrong shape, parameter outside its domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Evaluation hit a pole. `factor` is the vanishing denominator.
class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, cplx factor)
        : std::domain_error(what), factor_(factor) {}
    cplx factor() const { return factor_; }

private:
    cplx factor_;
};

// Quadrature or series did not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

}  // namespace qkzb

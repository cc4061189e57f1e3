#pragma once

#include <stdexcept>
#include <string>

namespace photon_beat {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested parameter combination has no closed form in this library.
class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of budget before reaching the requested tolerance.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, double achieved_error)
        : Error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Least-squares fit did not converge or the model is not identifiable.
class FitFailure : public Error {
public:
    FitFailure(const std::string& what, int iterations = 0, double gradient_ratio = 0.0)
        : Error(what), iterations_(iterations), gradient_ratio_(gradient_ratio) {}
    int iterations() const noexcept { return iterations_; }
    /// Final gradient norm relative to the gradient norm at the starting point.
    double gradient_ratio() const noexcept { return gradient_ratio_; }

private:
    int iterations_;
    double gradient_ratio_;
};

/// Invalid run or file configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace photon_beat

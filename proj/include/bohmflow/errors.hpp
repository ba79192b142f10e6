#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bohmflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class UnsupportedModeError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class PositivityViolation : public Error {
public:
    using Error::Error;
};

class UnsupportedTemperatureError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class SamplingFailure : public Error {
public:
    using Error::Error;
};

class RateSingularity : public Error {
public:
    using Error::Error;
};

class StepSizeError : public Error {
public:
    using Error::Error;
};

/// Raised when a diagnostic cannot produce a meaningful value, e.g. too many
/// trajectories were truncated at nodes.
class DiagnosticFailure : public Error {
public:
    DiagnosticFailure(const std::string& what, std::size_t count)
        : Error(what), count_(count) {}
    std::size_t count() const noexcept { return count_; }

private:
    std::size_t count_;
};

/// Velocity requested where the probability density (numerically) vanishes.
class NodalSingularity : public Error {
public:
    NodalSingularity(double x1, double x2, double omega_t, double density)
        : Error("nodal singularity at (x1=" + std::to_string(x1) + ", x2=" + std::to_string(x2) +
                ", omega_t=" + std::to_string(omega_t) + "), density " + std::to_string(density)),
          x1_(x1), x2_(x2), omega_t_(omega_t), density_(density) {}

    double x1() const noexcept { return x1_; }
    double x2() const noexcept { return x2_; }
    double omega_t() const noexcept { return omega_t_; }
    double density() const noexcept { return density_; }

private:
    double x1_, x2_, omega_t_, density_;
};

}  // namespace bohmflow

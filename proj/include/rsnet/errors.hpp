#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NotMMatrix : public Error {
public:
    using Error::Error;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

/// A constructed certificate (e.g. a Lyapunov scaling) failed its own check.
class CertificateFailure : public Error {
public:
    using Error::Error;
};

class UnsupportedVariant : public Error {
public:
    using Error::Error;
};

class MaxIterationsExceeded : public Error {
public:
    MaxIterationsExceeded(const std::string& what, long iterations, double last_delta)
        : Error(what), iterations_(iterations), last_delta_(last_delta) {}
    long iterations() const noexcept { return iterations_; }
    double last_delta() const noexcept { return last_delta_; }

private:
    long iterations_;
    double last_delta_;
};

/// The fixed-point iteration stopped but the stationary residual is above tolerance.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class SolverFailure : public Error {
public:
    using Error::Error;
};

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

/// A theorem's hypothesis does not hold, so its certificate is not applicable.
class ConditionViolated : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    NonFiniteState(const std::string& what, double time, std::size_t step)
        : Error(what), time_(time), step_(step) {}
    double time() const noexcept { return time_; }
    std::size_t step() const noexcept { return step_; }

private:
    double time_;
    std::size_t step_;
};

class EpsilonTooLarge : public Error {
public:
    EpsilonTooLarge(const std::string& what, double bound) : Error(what), bound_(bound) {}
    double bound() const noexcept { return bound_; }

private:
    double bound_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class GapTooLarge : public Error {
public:
    GapTooLarge(const std::string& what, std::size_t line, double gap_hours)
        : Error(what), line_(line), gap_hours_(gap_hours) {}
    std::size_t line() const noexcept { return line_; }
    double gap_hours() const noexcept { return gap_hours_; }

private:
    std::size_t line_;
    double gap_hours_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rsnet

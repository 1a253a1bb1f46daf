#pragma once

#include <stdexcept>
#include <string>

namespace thc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical or model parameter violates its invariant (non-positive, non-finite).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A caller-supplied range, grid size or option is malformed.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class CalibrationFailure : public Error {
public:
    CalibrationFailure(const std::string& what, double best_residual)
        : Error(what + " (best residual " + std::to_string(best_residual) + " degC)"),
          best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class IntegrationFailure : public Error {
public:
    using Error::Error;
};

/// Raised when a closed-form result fails its own residual check. Indicates a bug.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace thc

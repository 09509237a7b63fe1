#pragma once

#include <stdexcept>
#include <string>

namespace qot {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-square input or mismatched dimensions.
class DimensionError : public Error {
    using Error::Error;
};

/// The dense eigensolver failed or produced an invalid decomposition.
class EigensolverError : public Error {
    using Error::Error;
};

/// Argument outside the domain of a scalar function or of an inverse function.
class DomainError : public Error {
    using Error::Error;
};

/// The exponent in exp((tensor_sum(U,V) - C)/epsilon) exceeded the overflow
/// guard; for compliant step sizes this indicates a bug in the caller.
class DivergedDualError : public Error {
    using Error::Error;
};

/// A dual value larger than tr((rho x sigma) C) beyond floating-point noise
/// was passed where the theory guarantees the opposite ordering.
class InconsistentDualValueError : public Error {
    using Error::Error;
};

/// Too few trace records to fit a convergence rate.
class InsufficientTraceError : public Error {
    using Error::Error;
};

enum class ValidationFailure {
    NonHermitian,
    TraceNotOne,
    NotPositiveDefinite,
    NonPositiveEpsilon,
    DimensionMismatch,
};

inline const char* to_string(ValidationFailure kind) {
    switch (kind) {
    case ValidationFailure::NonHermitian: return "NonHermitian";
    case ValidationFailure::TraceNotOne: return "TraceNotOne";
    case ValidationFailure::NotPositiveDefinite: return "NotPositiveDefinite";
    case ValidationFailure::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ValidationFailure::DimensionMismatch: return "DimensionMismatch";
    }
    return "Unknown";
}

/// Structured rejection of a problem instance. `which` names the offending
/// matrix or field, `value` carries the diagnostic quantity (max asymmetry,
/// trace, smallest eigenvalue, epsilon).
class ValidationError : public Error {
public:
    ValidationError(ValidationFailure kind, std::string which, double value,
                    const std::string& what)
        : Error(what), kind_(kind), which_(std::move(which)), value_(value) {}

    ValidationFailure kind() const { return kind_; }
    const std::string& which() const { return which_; }
    double value() const { return value_; }

private:
    ValidationFailure kind_;
    std::string which_;
    double value_;
};

} // namespace qot

#pragma once

#include <stdexcept>
#include <string>

namespace ou {

// Error categories, mapped to CLI exit codes:
//   config        -> 2
//   domain/regime -> 3
//   convergence   -> 1
enum class ErrorKind {
    config,
    hurwitz_violation,
    domain_too_small,
    fractional_unsupported,
    grid_mismatch,
    resolution_too_coarse,
    missing_derivative,
    regime_refused,
    domain_error,
    convergence,
};

class OuError : public std::runtime_error {
public:
    OuError(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::config:
            case ErrorKind::grid_mismatch:
                return 2;
            case ErrorKind::convergence:
                return 1;
            default:
                return 3;
        }
    }

    const char* kind_name() const noexcept {
        switch (kind_) {
            case ErrorKind::config: return "ConfigError";
            case ErrorKind::hurwitz_violation: return "HurwitzViolation";
            case ErrorKind::domain_too_small: return "DomainTooSmall";
            case ErrorKind::fractional_unsupported: return "FractionalUnsupported";
            case ErrorKind::grid_mismatch: return "GridMismatch";
            case ErrorKind::resolution_too_coarse: return "ResolutionTooCoarse";
            case ErrorKind::missing_derivative: return "MissingDerivative";
            case ErrorKind::regime_refused: return "RegimeRefused";
            case ErrorKind::domain_error: return "DomainError";
            case ErrorKind::convergence: return "ConvergenceError";
        }
        return "OuError";
    }

private:
    ErrorKind kind_;
};

struct HurwitzViolation : OuError {
    explicit HurwitzViolation(const std::string& msg)
        : OuError(ErrorKind::hurwitz_violation, msg) {}
};

struct DomainTooSmall : OuError {
    explicit DomainTooSmall(const std::string& msg)
        : OuError(ErrorKind::domain_too_small, msg) {}
};

struct FractionalUnsupported : OuError {
    explicit FractionalUnsupported(const std::string& msg)
        : OuError(ErrorKind::fractional_unsupported, msg) {}
};

struct GridMismatch : OuError {
    explicit GridMismatch(const std::string& msg)
        : OuError(ErrorKind::grid_mismatch, msg) {}
};

struct ResolutionTooCoarse : OuError {
    explicit ResolutionTooCoarse(const std::string& msg)
        : OuError(ErrorKind::resolution_too_coarse, msg) {}
};

struct MissingDerivative : OuError {
    explicit MissingDerivative(const std::string& msg)
        : OuError(ErrorKind::missing_derivative, msg) {}
};

struct RegimeRefused : OuError {
    explicit RegimeRefused(const std::string& msg)
        : OuError(ErrorKind::regime_refused, msg) {}
};

struct DomainError : OuError {
    explicit DomainError(const std::string& msg)
        : OuError(ErrorKind::domain_error, msg) {}
};

struct ConvergenceError : OuError {
    explicit ConvergenceError(const std::string& msg)
        : OuError(ErrorKind::convergence, msg) {}
};

struct ConfigError : OuError {
    explicit ConfigError(const std::string& msg)
        : OuError(ErrorKind::config, msg) {}
};

}  // namespace ou

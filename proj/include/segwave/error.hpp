#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segwave {

/// Failure categories raised by the solvers. The CLI maps these onto exit
/// codes: validation problems exit with 2, solver failures with 3.
enum class ErrorKind {
    InvalidArgument,
    StepUnderflow,
    NonFiniteRhs,
    NoSignChange,
    SingularPivot,
    IntegrationFailure,
    ExistenceViolation,
    NoConvergence,
    DomainViolation,
    BracketFailure,
    NewtonStall,
    MonotonicityViolation,
    StabilityViolation,
    FrontLost,
    AssumptionViolation,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for errors caused by bad user input rather than a numerical failure.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

}  // namespace segwave

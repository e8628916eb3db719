#include "segwave/error.hpp"

namespace segwave {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::StepUnderflow: return "StepUnderflow";
        case ErrorKind::NonFiniteRhs: return "NonFiniteRhs";
        case ErrorKind::NoSignChange: return "NoSignChange";
        case ErrorKind::SingularPivot: return "SingularPivot";
        case ErrorKind::IntegrationFailure: return "IntegrationFailure";
        case ErrorKind::ExistenceViolation: return "ExistenceViolation";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DomainViolation: return "DomainViolation";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::NewtonStall: return "NewtonStall";
        case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
        case ErrorKind::StabilityViolation: return "StabilityViolation";
        case ErrorKind::FrontLost: return "FrontLost";
        case ErrorKind::AssumptionViolation: return "AssumptionViolation";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
    return kind == ErrorKind::InvalidArgument || kind == ErrorKind::AssumptionViolation ||
           kind == ErrorKind::DomainViolation || kind == ErrorKind::IoError;
}

}  // namespace segwave

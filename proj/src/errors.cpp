#include "lbcoh/errors.hpp"

namespace lbc {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveFrequency: return "NonPositiveFrequency";
        case ErrorCode::MissingTau: return "MissingTau";
        case ErrorCode::NegativeTemperature: return "NegativeTemperature";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::ZeroFrequency: return "ZeroFrequency";
        case ErrorCode::ZeroInitialCoherence: return "ZeroInitialCoherence";
        case ErrorCode::NonUniformGrid: return "NonUniformGrid";
        case ErrorCode::PeakNotResolved: return "PeakNotResolved";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::NormDriftExceeded: return "NormDriftExceeded";
        case ErrorCode::RecurrenceTooShort: return "RecurrenceTooShort";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::QuadratureNotConverged:
        case ErrorCode::NormDriftExceeded:
        case ErrorCode::RecurrenceTooShort:
        case ErrorCode::PeakNotResolved:
            return 3;
        default:
            return 2;
    }
}

}  // namespace lbc

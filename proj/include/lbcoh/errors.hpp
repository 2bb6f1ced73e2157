#pragma once

#include <stdexcept>
#include <string>

namespace lbc {

enum class ErrorCode {
    NonPositiveFrequency,
    MissingTau,
    NegativeTemperature,
    InvalidParameter,
    ZeroFrequency,
    ZeroInitialCoherence,
    NonUniformGrid,
    PeakNotResolved,
    QuadratureNotConverged,
    NormDriftExceeded,
    RecurrenceTooShort,
    ConfigError,
    IoError,
};

const char* error_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto a process exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// 2 = configuration problem, 3 = numerical convergence problem, 4 = validation failure.
int exit_code_for(ErrorCode code);

}  // namespace lbc

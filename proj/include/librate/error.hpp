#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace librate {

enum class ErrorCode {
    DivisionByZeroInterval,
    DomainError,
    SingularEnclosure,
    CollisionBox,
    IsolationFailed,
    StepFailure,
    BlowUp,
    NoTransversalCrossing,
    ConstraintUndecided,
    NewtonFailed,
    SlopeFailed,
    EnergyDerivativeVanishes,
    EigSplitFailed,
    BadBlockStructure,
    EigenFailure,
    ResonanceDivisionFailure,
    InclusionFailed,
    SignUndecided,
    DenominatorZero,
    ChainGap,
    InvalidArgument,
    ConfigError,
    MissingCertificate,
    IOError,
};

const char* error_name(ErrorCode c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Outcome of a certification step.
struct Verdict {
    bool verified = false;
    ErrorCode reason = ErrorCode::InvalidArgument;
    std::string detail;

    static Verdict ok() { return Verdict{true, ErrorCode::InvalidArgument, {}}; }
    static Verdict fail(ErrorCode c, std::string d) { return Verdict{false, c, std::move(d)}; }
    static Verdict from(const Error& e) { return fail(e.code(), e.what()); }
};

}  // namespace librate

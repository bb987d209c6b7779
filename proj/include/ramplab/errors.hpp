#pragma once

#include <stdexcept>
#include <string>

namespace ramplab {

// Every failure the library can signal, grouped by how the CLI maps them to
// exit codes: input/data problems exit 2, numerical/convergence problems exit 3.
enum class ErrorCode {
    // data / input
    MissingColumn,
    NonBinaryOutcome,
    EmptyAfterCompleteCase,
    RankDeficient,
    UnknownColumn,
    NotContinuous,
    VariableInInteraction,
    NotBinary,
    NonPositiveA,
    DimensionMismatch,
    UnknownTable,
    InvalidArgument,
    IoError,
    // numerical / convergence
    EmptyTrimSet,
    RankDeficientTrimSet,
    PerfectSeparation,
    SingularA,
    DidNotConverge,
    TooManyFailures,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonBinaryOutcome: return "NonBinaryOutcome";
        case ErrorCode::EmptyAfterCompleteCase: return "EmptyAfterCompleteCase";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::NotContinuous: return "NotContinuous";
        case ErrorCode::VariableInInteraction: return "VariableInInteraction";
        case ErrorCode::NotBinary: return "NotBinary";
        case ErrorCode::NonPositiveA: return "NonPositiveA";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnknownTable: return "UnknownTable";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::EmptyTrimSet: return "EmptyTrimSet";
        case ErrorCode::RankDeficientTrimSet: return "RankDeficientTrimSet";
        case ErrorCode::PerfectSeparation: return "PerfectSeparation";
        case ErrorCode::SingularA: return "SingularA";
        case ErrorCode::DidNotConverge: return "DidNotConverge";
        case ErrorCode::TooManyFailures: return "TooManyFailures";
    }
    return "Unknown";
}

// True for failures caused by user input or malformed data (CLI exit 2);
// false for numerical/convergence failures (CLI exit 3).
inline bool is_input_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::EmptyTrimSet:
        case ErrorCode::RankDeficientTrimSet:
        case ErrorCode::PerfectSeparation:
        case ErrorCode::SingularA:
        case ErrorCode::DidNotConverge:
        case ErrorCode::TooManyFailures:
            return false;
        default:
            return true;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace ramplab

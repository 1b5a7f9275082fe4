#pragma once

#include <stdexcept>
#include <string>

namespace qdev {

/// Category of a toolkit failure. Every throw site picks the most specific
/// code so callers (and the CLI exit path) can react without string matching.
enum class ErrorCode {
    InvalidQuantity,       // non-finite or out-of-domain physical value
    InvalidInput,          // argument violates an operation precondition
    InsufficientData,      // fewer samples than the operation needs
    NoDipFound,            // trace has no visible resonance dip
    UnphysicalFit,         // fit converged to a non-physical parameter set
    ConstantSignal,        // decay trace carries no signal variation
    DetuningUnresolved,    // Ramsey spectrum has no nonzero peak
    InconsistentPunchout,  // punch-out shift sign disagrees with detuning
    InconsistentDispersive,// dispersive-shift radicand negative
    BadInitialGuess,       // residual non-finite at the starting point
    FitFailure,            // fitter hit non-finite values mid-run
    SweepFailed,           // power sweep ended with < 2 usable fits
    F0Mismatch,            // sweep traces belong to different resonators
    ParseError,            // file ingestion failure (message carries line)
    MissingMetadata,       // power/attenuation needed but not provided
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace qdev

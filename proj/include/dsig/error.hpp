#ifndef DSIG_ERROR_HPP
#define DSIG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dsig {

/// Failure categories shared by every module. The C API maps these
/// one-to-one onto dsig_status codes.
enum class ErrorCode {
    InvalidArgument,
    InvalidParams,
    NoRealRootTail,
    UnsupportedOrder,
    TailNotConverged,
    ShapeMismatch,
    BlowUp,
    InvalidQuery,
    DegenerateDenominator,
    InsufficientSamples,
    NonpositiveValue,
    MissingChannel,
    Config,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the semilinear stepper when the solution leaves the
/// small-data regime (threshold exceeded or non-finite samples).
class BlowUpError : public Error {
public:
    explicit BlowUpError(double t)
        : Error(ErrorCode::BlowUp, "blow-up detected at t = " + std::to_string(t)),
          time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace dsig

#endif

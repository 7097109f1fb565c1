#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddmet {

enum class ErrorKind {
    InvalidArgument,
    NonHermitian,
    ConvergenceFailure,
    DimensionOverflow,
    DimensionMismatch,
    NotNormalized,
    InvalidDensityMatrix,
    DerivativeUnavailable,
    AmplitudeVanished,
    PositivityViolation,
    DegenerateK,
    UnsupportedSchedule,
    NotUnitary,
    NotAChannel,
    NotOrthonormal,
    InfeasibleRounding,
    StepTooLarge,
    GridMisalignment,
    NormDrift,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (notably the
// CLI exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Raised when c_e(t) vanishes; the zero is known to lie in [lo, hi].
class AmplitudeVanishedError : public Error {
public:
    AmplitudeVanishedError(double lo, double hi, const std::string& what)
        : Error(ErrorKind::AmplitudeVanished, what), lo_(lo), hi_(hi) {}

    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

} // namespace ddmet

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ensctl {

enum class ErrorKind {
    InvalidGrid,
    UnknownPreset,
    UnsupportedOrder,
    ZeroMass,
    CflUnderflow,
    NonFinite,
    CharacteristicEscape,
    GridMismatch,
    NotApplicable,
    UnsupportedDrift,
    DegenerateProbe,
    SchemaError,
    LinesearchFailure,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. Every failure path named by an operation contract
/// surfaces as one of these, tagged with its kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// True for failures caused by the numerics rather than by the input.
bool is_numerical(ErrorKind kind);

}  // namespace ensctl

#include "ensctl/error.hpp"

namespace ensctl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::UnknownPreset: return "UnknownPreset";
        case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
        case ErrorKind::ZeroMass: return "ZeroMass";
        case ErrorKind::CflUnderflow: return "CflUnderflow";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::CharacteristicEscape: return "CharacteristicEscape";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NotApplicable: return "NotApplicable";
        case ErrorKind::UnsupportedDrift: return "UnsupportedDrift";
        case ErrorKind::DegenerateProbe: return "DegenerateProbe";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::LinesearchFailure: return "LinesearchFailure";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

bool is_numerical(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::CflUnderflow:
        case ErrorKind::NonFinite:
        case ErrorKind::CharacteristicEscape:
        case ErrorKind::LinesearchFailure:
        case ErrorKind::DegenerateProbe:
        case ErrorKind::ZeroMass:
            return true;
        default:
            return false;
    }
}

}  // namespace ensctl

#include "hapstep/error.hpp"

namespace hapstep {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Format: return "format";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::Input: return "input";
    case ErrorKind::Config: return "config";
    case ErrorKind::InsufficientSteps: return "insufficient-steps";
    case ErrorKind::PhaseDetection: return "phase-detection";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::DegenerateProfile: return "degenerate-profile";
    case ErrorKind::PhaseInconsistency: return "phase-inconsistency";
    case ErrorKind::UnderdeterminedFit: return "underdetermined-fit";
    case ErrorKind::Analysis: return "analysis";
    case ErrorKind::Clock: return "clock";
    case ErrorKind::IncompleteGrid: return "incomplete-grid";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace hapstep

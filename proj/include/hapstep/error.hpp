#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hapstep {

enum class ErrorKind {
    Parse,
    Format,
    EmptyInput,
    Input,
    Config,
    InsufficientSteps,
    PhaseDetection,
    Alignment,
    DegenerateProfile,
    PhaseInconsistency,
    UnderdeterminedFit,
    Analysis,
    Clock,
    IncompleteGrid,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Every module reports failures through this one exception type; the kind
// decides the CLI exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace hapstep

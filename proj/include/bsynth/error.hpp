#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bsynth {

enum class ErrorKind {
    DegreeExceeded,
    RadiusExceeded,
    ExplosionGuard,
    BadRadius,
    NotATree,
    ZeroMeanDegree,
    ParameterMismatch,
    ParseError,
    InvariantViolation,
    InsufficientDepth,
    ValidationRequired,
    InfeasibleRounding,
    MaxNExceeded,
    OddLoopCell,
    PartitionInfeasible,
    BallTooLarge,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to a stable exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace bsynth

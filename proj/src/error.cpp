#include "bsynth/error.hpp"

namespace bsynth {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegreeExceeded: return "DegreeExceeded";
        case ErrorKind::RadiusExceeded: return "RadiusExceeded";
        case ErrorKind::ExplosionGuard: return "ExplosionGuard";
        case ErrorKind::BadRadius: return "BadRadius";
        case ErrorKind::NotATree: return "NotATree";
        case ErrorKind::ZeroMeanDegree: return "ZeroMeanDegree";
        case ErrorKind::ParameterMismatch: return "ParameterMismatch";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::InsufficientDepth: return "InsufficientDepth";
        case ErrorKind::ValidationRequired: return "ValidationRequired";
        case ErrorKind::InfeasibleRounding: return "InfeasibleRounding";
        case ErrorKind::MaxNExceeded: return "MaxNExceeded";
        case ErrorKind::OddLoopCell: return "OddLoopCell";
        case ErrorKind::PartitionInfeasible: return "PartitionInfeasible";
        case ErrorKind::BallTooLarge: return "BallTooLarge";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace bsynth

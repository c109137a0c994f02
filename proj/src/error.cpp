#include "edtr/error.hpp"

namespace edtr {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::MalformedLine: return "MalformedLine";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::EmptyDataset: return "EmptyDataset";
        case Errc::DuplicateQueryId: return "DuplicateQueryId";
        case Errc::EndpointUnreachable: return "EndpointUnreachable";
        case Errc::BadResponseShape: return "BadResponseShape";
        case Errc::MissingPrecomputedVector: return "MissingPrecomputedVector";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::NonFiniteInput: return "NonFiniteInput";
        case Errc::ZeroNormRow: return "ZeroNormRow";
        case Errc::DegenerateCloud: return "DegenerateCloud";
        case Errc::InsufficientClusters: return "InsufficientClusters";
        case Errc::CloudTooLarge: return "CloudTooLarge";
        case Errc::EmptyTokenStream: return "EmptyTokenStream";
        case Errc::NonPositiveAlpha: return "NonPositiveAlpha";
        case Errc::InvalidHyper: return "InvalidHyper";
        case Errc::InconsistentN: return "InconsistentN";
        case Errc::EmptyPredictions: return "EmptyPredictions";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::JoinFailure: return "JoinFailure";
        case Errc::IncompatibleParameters: return "IncompatibleParameters";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace edtr

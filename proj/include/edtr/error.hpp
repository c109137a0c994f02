#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edtr {

enum class Errc {
    InvalidArgument,
    MalformedLine,
    DimensionMismatch,
    EmptyDataset,
    DuplicateQueryId,
    EndpointUnreachable,
    BadResponseShape,
    MissingPrecomputedVector,
    InvalidSpec,
    NonFiniteInput,
    ZeroNormRow,
    DegenerateCloud,
    InsufficientClusters,
    CloudTooLarge,
    EmptyTokenStream,
    NonPositiveAlpha,
    InvalidHyper,
    InconsistentN,
    EmptyPredictions,
    InvalidConfig,
    JoinFailure,
    IncompatibleParameters,
    Io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace edtr

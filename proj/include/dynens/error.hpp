#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynens {

enum class ErrorKind {
    // core
    NonPositiveCount,
    MismatchedParamCount,
    DuplicateModelName,
    InvalidProbabilityRow,
    LabelOutOfRange,
    InvalidConfig,
    // weighting
    AllZeroAccuracies,
    UnequalEpochCounts,
    MissingAccuracySource,
    // inference
    ShapeMismatch,
    AllZeroWeights,
    // metrics
    LengthMismatch,
    EmptyMatrix,
    AllPairsEqual,
    // synth
    SmallClass,
    BadFractions,
    InvalidSynthSpec,
    // dataio
    MissingManifest,
    MissingFile,
    SchemaVersionUnsupported,
    RowCountMismatch,
    BadProbabilityRow,
    ParseError,
    IoError,
    // bench
    TooFewModels,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every module reports failures through this exception. The kind name is
/// the stable, machine-parseable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace dynens

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cogload {

/// Error taxonomy shared by every module. One exception type carries a code
/// so call sites can branch on the failure class without string matching.
enum class ErrorCode {
    // text / codec layer
    EmptyInput,
    AmbiguousEncoding,
    MalformedObfuscation,
    UnknownLevel,
    CarrierTooShort,
    MissingAnswerSection,
    AmbiguousSections,
    // gateway
    AuthError,
    RateLimited,
    ProviderError,
    Timeout,
    // judge protocols
    UnparseableVerdict,
    UnparseableScores,
    OutOfRangeScore,
    // orchestration
    ParaphraseRefused,
    ValidationFailed,
    GateError,
    // metrics
    UnknownTokenizer,
    ShapeError,
    DegenerateVariance,
    TooFewSamples,
    // datastore
    IntegrityError,
    EmptyDataset,
    LedgerCorrupt,
    SchemaVersion,
    IoError,
    // cli / config
    UsageError,
    PreconditionFailed,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          detail_() {}

    Error(ErrorCode code, const std::string& message, std::string detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }

    /// Extra payload some errors keep around (raw model reply, provider body).
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace cogload

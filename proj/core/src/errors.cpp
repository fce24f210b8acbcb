#include "cogload/errors.hpp"

namespace cogload {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::AmbiguousEncoding: return "AmbiguousEncoding";
        case ErrorCode::MalformedObfuscation: return "MalformedObfuscation";
        case ErrorCode::UnknownLevel: return "UnknownLevel";
        case ErrorCode::CarrierTooShort: return "CarrierTooShort";
        case ErrorCode::MissingAnswerSection: return "MissingAnswerSection";
        case ErrorCode::AmbiguousSections: return "AmbiguousSections";
        case ErrorCode::AuthError: return "AuthError";
        case ErrorCode::RateLimited: return "RateLimited";
        case ErrorCode::ProviderError: return "ProviderError";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::UnparseableVerdict: return "UnparseableVerdict";
        case ErrorCode::UnparseableScores: return "UnparseableScores";
        case ErrorCode::OutOfRangeScore: return "OutOfRangeScore";
        case ErrorCode::ParaphraseRefused: return "ParaphraseRefused";
        case ErrorCode::ValidationFailed: return "ValidationFailed";
        case ErrorCode::GateError: return "GateError";
        case ErrorCode::UnknownTokenizer: return "UnknownTokenizer";
        case ErrorCode::ShapeError: return "ShapeError";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::IntegrityError: return "IntegrityError";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::LedgerCorrupt: return "LedgerCorrupt";
        case ErrorCode::SchemaVersion: return "SchemaVersion";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UsageError: return "UsageError";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    }
    return "UnknownError";
}

}  // namespace cogload

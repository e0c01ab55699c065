#include "secstate/errors.hpp"

namespace secstate {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::EmptyControlList: return "EmptyControlList";
        case ErrorCode::ZeroCapacity: return "ZeroCapacity";
        case ErrorCode::ZeroDataItems: return "ZeroDataItems";
        case ErrorCode::NoRulesDefined: return "NoRulesDefined";
        case ErrorCode::MissingContext: return "MissingContext";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::MissingLocalState: return "MissingLocalState";
        case ErrorCode::EmptyDomain: return "EmptyDomain";
        case ErrorCode::NoDomains: return "NoDomains";
        case ErrorCode::WeightsNotNormalized: return "WeightsNotNormalized";
        case ErrorCode::UnknownEventKind: return "UnknownEventKind";
        case ErrorCode::UnknownTarget: return "UnknownTarget";
        case ErrorCode::CapacityExceeded: return "CapacityExceeded";
        case ErrorCode::ExhaustedScenario: return "ExhaustedScenario";
        case ErrorCode::UnknownScope: return "UnknownScope";
        case ErrorCode::ScopeMismatch: return "ScopeMismatch";
        case ErrorCode::NotLoaded: return "NotLoaded";
        case ErrorCode::ReadOnly: return "ReadOnly";
        case ErrorCode::UsageError: return "UsageError";
    }
    return "Error";
}

} // namespace secstate

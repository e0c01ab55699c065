#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace secstate {

enum class ErrorCode {
    ParseError,
    ValidationError,
    UnknownId,
    EmptyControlList,
    ZeroCapacity,
    ZeroDataItems,
    NoRulesDefined,
    MissingContext,
    OutOfRange,
    MissingLocalState,
    EmptyDomain,
    NoDomains,
    WeightsNotNormalized,
    UnknownEventKind,
    UnknownTarget,
    CapacityExceeded,
    ExhaustedScenario,
    UnknownScope,
    ScopeMismatch,
    NotLoaded,
    ReadOnly,
    UsageError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the whole library; callers switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace secstate

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fscs
{

enum class ErrorCode
{
    // dataset / episodes
    MissingManifest,
    InvalidManifest,
    MaskImageMismatch,
    UnknownClassInMask,
    InsufficientImages,
    InvalidEpisodeSpec,
    UnknownEpisode,
    // geometry / canvas
    EmptyMask,
    BoxOutOfBounds,
    DimensionMismatch,
    MalformedEncoding,
    ImageIo,
    // prompts
    UnboundPlaceholder,
    ParseError,
    IllegalPlan,
    InvalidTemplate,
    // toolkit
    TranscriptExhausted,
    RequestMismatch,
    AuthError,
    ToolFailure,
    // metrics
    KeyMismatch,
    EmptyInput,
    // config
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message):
        std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    /// Parse errors are the only kind a caller may re-ask for.
    [[nodiscard]] bool retryable() const noexcept { return code_ == ErrorCode::ParseError; }

private:
    ErrorCode code_;
};

} // namespace fscs

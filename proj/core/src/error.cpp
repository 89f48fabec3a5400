// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"

namespace fscs
{

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::MissingManifest: return "MissingManifest";
        case ErrorCode::InvalidManifest: return "InvalidManifest";
        case ErrorCode::MaskImageMismatch: return "MaskImageMismatch";
        case ErrorCode::UnknownClassInMask: return "UnknownClassInMask";
        case ErrorCode::InsufficientImages: return "InsufficientImages";
        case ErrorCode::InvalidEpisodeSpec: return "InvalidEpisodeSpec";
        case ErrorCode::UnknownEpisode: return "UnknownEpisode";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::BoxOutOfBounds: return "BoxOutOfBounds";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MalformedEncoding: return "MalformedEncoding";
        case ErrorCode::ImageIo: return "ImageIo";
        case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IllegalPlan: return "IllegalPlan";
        case ErrorCode::InvalidTemplate: return "InvalidTemplate";
        case ErrorCode::TranscriptExhausted: return "TranscriptExhausted";
        case ErrorCode::RequestMismatch: return "RequestMismatch";
        case ErrorCode::AuthError: return "AuthError";
        case ErrorCode::ToolFailure: return "ToolFailure";
        case ErrorCode::KeyMismatch: return "KeyMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

} // namespace fscs

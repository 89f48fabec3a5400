// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/class_id.hpp"
#include "fscs/mask.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>

namespace fscs
{

/// Presence decision and mask per support class.
struct Prediction
{
    std::map<ClassId, bool> presence;
    std::map<ClassId, BinaryMask> masks;
    bool failed = false;
    std::optional<std::string> failure_reason;

    bool operator==(const Prediction&) const = default;
};

/// Masks are stored as base64 RLE.
nlohmann::json to_json(const Prediction& prediction);
Prediction prediction_from_json(const nlohmann::json& j);

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string_view>
#include <utility>

namespace fscs::detail
{

/// One past the bracket closing the value opened at `start`, honoring JSON strings.
std::optional<std::size_t> balanced_end(std::string_view raw, std::size_t start);

/// First balanced value opening with `open` that parses and satisfies `accept`.
std::optional<std::pair<std::string_view, nlohmann::json>> find_json(
    std::string_view raw, char open, const std::function<bool(const nlohmann::json&)>& accept = {});

} // namespace fscs::detail

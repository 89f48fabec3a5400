// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <string>

namespace fscs
{

/// 1-based dataset class index.
struct ClassId
{
    int value = 0;

    auto operator<=>(const ClassId&) const = default;
};

inline std::string to_string(ClassId id)
{
    return std::to_string(id.value);
}

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace fscs::detail
{

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

/// Rows of a 5x7 digit bitmap, most significant of the low 5 bits = leftmost column.
const std::array<std::uint8_t, kGlyphHeight>& digit_glyph(int digit);

} // namespace fscs::detail

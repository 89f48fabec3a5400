// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/mask.hpp"

#include <string>
#include <string_view>

namespace fscs
{

enum class MaskFormat
{
    png_1bit,
    rle,
};

/// RLE layout: u32le width, u32le height, then u32le run lengths alternating
/// false/true, starting with the count of false bits (possibly zero).
std::string encode_mask(const BinaryMask& mask, MaskFormat format);

/// Throws MalformedEncoding on truncated or inconsistent input.
BinaryMask decode_mask(std::string_view bytes, MaskFormat format);

} // namespace fscs

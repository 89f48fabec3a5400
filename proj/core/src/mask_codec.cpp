// SPDX-License-Identifier: Apache-2.0
#include "fscs/mask_codec.hpp"

#include "fscs/error.hpp"
#include "fscs/image_io.hpp"

#include <cstdint>

namespace fscs
{

namespace
{

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t pos)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t(static_cast<unsigned char>(bytes[pos + std::size_t(i)])) << (8 * i);
    return v;
}

std::string encode_rle(const BinaryMask& mask)
{
    std::string out;
    put_u32(out, static_cast<std::uint32_t>(mask.width()));
    put_u32(out, static_cast<std::uint32_t>(mask.height()));

    auto const bits = mask.bits();
    std::uint8_t current = 0;
    std::uint32_t run = 0;
    for (auto b: bits)
    {
        if (b != current)
        {
            put_u32(out, run);
            current = b;
            run = 0;
        }
        ++run;
    }
    if (run > 0 || bits.empty())
        put_u32(out, run);
    return out;
}

BinaryMask decode_rle(std::string_view bytes)
{
    if (bytes.size() < 8 || bytes.size() % 4 != 0)
        throw Error(ErrorCode::MalformedEncoding, "RLE stream truncated");

    auto const width = get_u32(bytes, 0);
    auto const height = get_u32(bytes, 4);
    if (width > (1u << 16) || height > (1u << 16))
        throw Error(ErrorCode::MalformedEncoding, "RLE dimensions out of range");

    auto const total = std::uint64_t(width) * height;
    std::vector<std::uint8_t> bits;
    bits.reserve(total);
    std::uint8_t value = 0;
    for (std::size_t pos = 8; pos < bytes.size(); pos += 4)
    {
        auto const run = get_u32(bytes, pos);
        if (run == 0 && pos != 8)
            throw Error(ErrorCode::MalformedEncoding, "zero-length run after the first");
        if (bits.size() + run > total)
            throw Error(ErrorCode::MalformedEncoding, "RLE runs exceed mask size");
        bits.insert(bits.end(), run, value);
        value ^= 1;
    }
    if (bits.size() != total)
        throw Error(ErrorCode::MalformedEncoding, "RLE runs do not cover the mask");
    return BinaryMask(static_cast<int>(width), static_cast<int>(height), std::move(bits));
}

} // namespace

std::string encode_mask(const BinaryMask& mask, MaskFormat format)
{
    return format == MaskFormat::rle ? encode_rle(mask) : encode_mask_png(mask);
}

BinaryMask decode_mask(std::string_view bytes, MaskFormat format)
{
    if (format == MaskFormat::rle)
        return decode_rle(bytes);
    try
    {
        return decode_mask_png(bytes);
    }
    catch (const Error& e)
    {
        throw Error(ErrorCode::MalformedEncoding, e.what());
    }
}

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/image.hpp"
#include "fscs/mask.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fscs
{

/// Single-channel raster of raw sample values (class-indexed annotation masks).
struct IndexedRaster
{
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;
};

struct ImageDims
{
    int width = 0;
    int height = 0;
    bool operator==(const ImageDims&) const = default;
};

std::string encode_png(const Image& image);
Image decode_png(std::string_view bytes);

/// 1-bit grayscale PNG; true pixels are white.
std::string encode_mask_png(const BinaryMask& mask);
BinaryMask decode_mask_png(std::string_view bytes);

/// Reads palette indices or gray values without any color expansion.
IndexedRaster decode_indexed_png(std::string_view bytes);
std::string encode_indexed_png(const IndexedRaster& raster);

Image decode_jpeg(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Loads a PNG or JPEG, sniffed by magic bytes.
Image load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Image& image);

/// Reads only the header.
ImageDims probe_dims(const std::filesystem::path& path);

} // namespace fscs

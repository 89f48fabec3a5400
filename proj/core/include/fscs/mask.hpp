// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fscs
{

/// Row-major boolean raster. Bits are stored one per byte (0 or 1).
class BinaryMask
{
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }

    [[nodiscard]] bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v) noexcept { bits_[index(x, y)] = v ? 1 : 0; }

    [[nodiscard]] std::int64_t count() const noexcept;
    [[nodiscard]] bool none() const noexcept { return count() == 0; }
    [[nodiscard]] bool same_shape(const BinaryMask& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    /// Throws DimensionMismatch on shape mismatch.
    [[nodiscard]] BinaryMask operator&(const BinaryMask& other) const;
    [[nodiscard]] BinaryMask operator|(const BinaryMask& other) const;

    /// Keeps only pixels inside `box`.
    [[nodiscard]] BinaryMask clipped_to(const BBox& box) const;

    bool operator==(const BinaryMask&) const = default;

private:
    [[nodiscard]] std::size_t index(int x, int y) const noexcept
    {
        return std::size_t(y) * std::size_t(width_) + std::size_t(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Minimal box containing every true pixel. Throws EmptyMask when there is none.
BBox tight_bbox(const BinaryMask& mask);

/// Morphological dilation (radius > 0) or erosion (radius < 0) with a square structuring element.
BinaryMask morph(const BinaryMask& mask, int radius);

} // namespace fscs

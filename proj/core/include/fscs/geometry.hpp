// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace fscs
{

/// Pixel rectangle: x right, y down, origin top-left, min-inclusive / max-exclusive.
struct BBox
{
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    [[nodiscard]] int width() const noexcept { return x_max - x_min; }
    [[nodiscard]] int height() const noexcept { return y_max - y_min; }
    [[nodiscard]] std::int64_t area() const noexcept
    {
        return width() > 0 && height() > 0 ? std::int64_t(width()) * height() : 0;
    }
    [[nodiscard]] bool contains(int x, int y) const noexcept
    {
        return x >= x_min && x < x_max && y >= y_min && y < y_max;
    }
    [[nodiscard]] bool valid_for(int image_width, int image_height) const noexcept
    {
        return 0 <= x_min && x_min < x_max && x_max <= image_width && 0 <= y_min && y_min < y_max
               && y_max <= image_height;
    }

    auto operator<=>(const BBox&) const = default;
};

std::string to_string(const BBox& box);

/// Clamp each edge into [0, width] x [0, height]. The result may be degenerate.
BBox clip_box(const BBox& box, int image_width, int image_height) noexcept;

/// Signed per-edge box correction proposed by a judge.
struct EdgeAdjust
{
    int dx_min = 0;
    int dy_min = 0;
    int dx_max = 0;
    int dy_max = 0;

    [[nodiscard]] bool is_zero() const noexcept { return dx_min == 0 && dy_min == 0 && dx_max == 0 && dy_max == 0; }

    auto operator<=>(const EdgeAdjust&) const = default;
};

/// `target - current` edge by edge.
EdgeAdjust edge_difference(const BBox& target, const BBox& current) noexcept;

/// Moves every edge of `box` by gain * adjust, rounding half up on the absolute coordinate.
BBox apply_edge_adjust(const BBox& box, const EdgeAdjust& adjust, double gain) noexcept;

} // namespace fscs

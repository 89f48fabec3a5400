// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/geometry.hpp"
#include "fscs/image.hpp"
#include "fscs/mask.hpp"

#include <optional>
#include <string>

namespace fscs
{

struct OverlayStyle
{
    Rgb box_color {255, 0, 0};
    int box_thickness = 3;
    Rgb mask_tint {102, 204, 255};
    double mask_alpha = 0.5;
};

struct GridSpec
{
    int tick_interval = 100;
    bool draw_full_grid = false;
    bool label_ticks = true;
    Rgb line_color {255, 255, 0};
    int label_size = 7; ///< glyph height in pixels; rounded down to a multiple of 7
    int tick_length = 6;
};

/// Draws a frame of `style.box_thickness` pixels just inside the perimeter of `box`.
Image draw_bbox(const Image& image, const BBox& box, const OverlayStyle& style);

/// Alpha-blends `style.mask_tint` over true-mask pixels, rounding half up per channel.
Image draw_mask_overlay(const Image& image, const BinaryMask& mask, const OverlayStyle& style);

/// Coordinate lines (or edge ticks) at every multiple of the interval, including 0.
Image draw_coordinate_grid(const Image& image, const GridSpec& spec);

/// Mask overlay, then box frame, then the optional grid.
Image compose_support_panel(const Image& image, const BinaryMask& mask, const BBox& box, const OverlayStyle& style,
                            const std::optional<GridSpec>& grid);

/// Image shown to the judge: mask overlay and the box it came from.
Image compose_judge_panel(const Image& image, const BinaryMask& mask, const std::optional<BBox>& box,
                          const OverlayStyle& style);

/// SHA-256 over width, height and raw pixels. Independent of any PNG encoder.
std::string content_hash(const Image& image);

void validate(const OverlayStyle& style);
void validate(const GridSpec& spec);

} // namespace fscs

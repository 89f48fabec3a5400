// SPDX-License-Identifier: Apache-2.0
#include "fscs/canvas.hpp"

#include "fscs/error.hpp"
#include "fscs/hashing.hpp"
#include "glyphs.hpp"

#include <fmt/format.h>

#include <cmath>
#include <string>

namespace fscs
{

Image::Image(int width, int height, Rgb fill): width_(width), height_(height)
{
    if (width < 1 || height < 1)
        throw Error(ErrorCode::DimensionMismatch, fmt::format("invalid image size {}x{}", width, height));
    pixels_.resize(std::size_t(width) * std::size_t(height) * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3)
    {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
    }
}

Image::Image(int width, int height, std::vector<std::uint8_t> pixels):
    width_(width), height_(height), pixels_(std::move(pixels))
{
    if (width < 1 || height < 1 || pixels_.size() != std::size_t(width) * std::size_t(height) * 3)
        throw Error(ErrorCode::DimensionMismatch, fmt::format("pixel buffer does not match {}x{}", width, height));
}

void validate(const OverlayStyle& style)
{
    if (style.box_thickness < 1)
        throw Error(ErrorCode::ConfigError, "box_thickness must be >= 1");
    if (!(style.mask_alpha >= 0.0 && style.mask_alpha <= 1.0))
        throw Error(ErrorCode::ConfigError, "mask_alpha must be in [0, 1]");
}

void validate(const GridSpec& spec)
{
    if (spec.tick_interval < 8)
        throw Error(ErrorCode::ConfigError, "tick_interval must be >= 8");
}

Image draw_bbox(const Image& image, const BBox& box, const OverlayStyle& style)
{
    validate(style);
    if (!box.valid_for(image.width(), image.height()))
        throw Error(ErrorCode::BoxOutOfBounds,
                    fmt::format("box {} invalid for {}x{} image", to_string(box), image.width(), image.height()));

    auto out = image;
    int const t = style.box_thickness;
    for (int y = box.y_min; y < box.y_max; ++y)
        for (int x = box.x_min; x < box.x_max; ++x)
        {
            bool const frame = x < box.x_min + t || x >= box.x_max - t || y < box.y_min + t || y >= box.y_max - t;
            if (frame)
                out.set(x, y, style.box_color);
        }
    return out;
}

namespace
{

std::uint8_t blend_channel(std::uint8_t src, std::uint8_t tint, double alpha)
{
    auto const v = (1.0 - alpha) * double(src) + alpha * double(tint);
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

void put_pixel(Image& img, int x, int y, Rgb c)
{
    if (x >= 0 && y >= 0 && x < img.width() && y < img.height())
        img.set(x, y, c);
}

void draw_number(Image& img, int origin_x, int origin_y, int value, int scale, Rgb color)
{
    auto const text = std::to_string(value);
    int cursor = origin_x;
    for (char ch: text)
    {
        auto const& glyph = detail::digit_glyph(ch - '0');
        for (int row = 0; row < detail::kGlyphHeight; ++row)
            for (int col = 0; col < detail::kGlyphWidth; ++col)
                if (glyph[std::size_t(row)] & (1u << (detail::kGlyphWidth - 1 - col)))
                    for (int sy = 0; sy < scale; ++sy)
                        for (int sx = 0; sx < scale; ++sx)
                            put_pixel(img, cursor + col * scale + sx, origin_y + row * scale + sy, color);
        cursor += (detail::kGlyphWidth + 1) * scale;
    }
}

} // namespace

Image draw_mask_overlay(const Image& image, const BinaryMask& mask, const OverlayStyle& style)
{
    validate(style);
    if (mask.width() != image.width() || mask.height() != image.height())
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("mask {}x{} vs image {}x{}", mask.width(), mask.height(), image.width(), image.height()));

    auto out = image;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            if (mask.at(x, y))
            {
                auto const src = image.at(x, y);
                out.set(x, y,
                        {blend_channel(src.r, style.mask_tint.r, style.mask_alpha),
                         blend_channel(src.g, style.mask_tint.g, style.mask_alpha),
                         blend_channel(src.b, style.mask_tint.b, style.mask_alpha)});
            }
    return out;
}

Image draw_coordinate_grid(const Image& image, const GridSpec& spec)
{
    validate(spec);
    auto out = image;
    int const w = image.width();
    int const h = image.height();
    int const vertical_extent = spec.draw_full_grid ? h : std::min(h, spec.tick_length);
    int const horizontal_extent = spec.draw_full_grid ? w : std::min(w, spec.tick_length);

    for (int x = 0; x < w; x += spec.tick_interval)
        for (int y = 0; y < vertical_extent; ++y)
            out.set(x, y, spec.line_color);
    for (int y = 0; y < h; y += spec.tick_interval)
        for (int x = 0; x < horizontal_extent; ++x)
            out.set(x, y, spec.line_color);

    if (spec.label_ticks)
    {
        int const scale = std::max(1, spec.label_size / detail::kGlyphHeight);
        for (int x = 0; x < w; x += spec.tick_interval)
            draw_number(out, x + 2, 1, x, scale, spec.line_color);
        for (int y = spec.tick_interval; y < h; y += spec.tick_interval)
            draw_number(out, 1, y + 2, y, scale, spec.line_color);
    }
    return out;
}

Image compose_support_panel(const Image& image, const BinaryMask& mask, const BBox& box, const OverlayStyle& style,
                            const std::optional<GridSpec>& grid)
{
    auto out = draw_bbox(draw_mask_overlay(image, mask, style), box, style);
    if (grid)
        out = draw_coordinate_grid(out, *grid);
    return out;
}

Image compose_judge_panel(const Image& image, const BinaryMask& mask, const std::optional<BBox>& box,
                          const OverlayStyle& style)
{
    auto out = draw_mask_overlay(image, mask, style);
    if (box)
        out = draw_bbox(out, *box, style);
    return out;
}

std::string content_hash(const Image& image)
{
    auto const px = image.pixels();
    auto buffer = fmt::format("{}x{}:", image.width(), image.height());
    buffer.append(reinterpret_cast<const char*>(px.data()), px.size());
    return sha256_hex(buffer);
}

} // namespace fscs

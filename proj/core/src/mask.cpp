// SPDX-License-Identifier: Apache-2.0
#include "fscs/mask.hpp"

#include "fscs/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fscs
{

std::string to_string(const BBox& box)
{
    return fmt::format("[{}, {}, {}, {}]", box.x_min, box.y_min, box.x_max, box.y_max);
}

BBox clip_box(const BBox& box, int image_width, int image_height) noexcept
{
    return {std::clamp(box.x_min, 0, image_width), std::clamp(box.y_min, 0, image_height),
            std::clamp(box.x_max, 0, image_width), std::clamp(box.y_max, 0, image_height)};
}

EdgeAdjust edge_difference(const BBox& target, const BBox& current) noexcept
{
    return {target.x_min - current.x_min, target.y_min - current.y_min, target.x_max - current.x_max,
            target.y_max - current.y_max};
}

BBox apply_edge_adjust(const BBox& box, const EdgeAdjust& adjust, double gain) noexcept
{
    auto const move = [gain](int edge, int delta) {
        return static_cast<int>(std::floor(double(edge) + gain * double(delta) + 0.5));
    };
    return {move(box.x_min, adjust.dx_min), move(box.y_min, adjust.dy_min), move(box.x_max, adjust.dx_max),
            move(box.y_max, adjust.dy_max)};
}

BinaryMask::BinaryMask(int width, int height, bool fill):
    width_(width), height_(height), bits_(std::size_t(width) * std::size_t(height), fill ? 1 : 0)
{
    if (width < 0 || height < 0)
        throw Error(ErrorCode::DimensionMismatch, "negative mask dimensions");
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits):
    width_(width), height_(height), bits_(std::move(bits))
{
    if (width < 0 || height < 0 || bits_.size() != std::size_t(width) * std::size_t(height))
        throw Error(ErrorCode::DimensionMismatch, "mask buffer does not match dimensions");
    for (auto& b: bits_)
        b = b != 0 ? 1 : 0;
}

std::int64_t BinaryMask::count() const noexcept
{
    return std::accumulate(bits_.begin(), bits_.end(), std::int64_t {0});
}

BinaryMask BinaryMask::operator&(const BinaryMask& other) const
{
    if (!same_shape(other))
        throw Error(ErrorCode::DimensionMismatch, "mask shapes differ");
    auto out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        out.bits_[i] = bits_[i] & other.bits_[i];
    return out;
}

BinaryMask BinaryMask::operator|(const BinaryMask& other) const
{
    if (!same_shape(other))
        throw Error(ErrorCode::DimensionMismatch, "mask shapes differ");
    auto out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        out.bits_[i] = bits_[i] | other.bits_[i];
    return out;
}

BinaryMask BinaryMask::clipped_to(const BBox& box) const
{
    auto out = BinaryMask(width_, height_);
    auto const b = clip_box(box, width_, height_);
    for (int y = b.y_min; y < b.y_max; ++y)
        for (int x = b.x_min; x < b.x_max; ++x)
            out.bits_[index(x, y)] = bits_[index(x, y)];
    return out;
}

BBox tight_bbox(const BinaryMask& mask)
{
    auto box = BBox {mask.width(), mask.height(), 0, 0};
    bool any = false;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y))
            {
                any = true;
                box.x_min = std::min(box.x_min, x);
                box.y_min = std::min(box.y_min, y);
                box.x_max = std::max(box.x_max, x + 1);
                box.y_max = std::max(box.y_max, y + 1);
            }
    if (!any)
        throw Error(ErrorCode::EmptyMask, "mask has no true pixel");
    return box;
}

BinaryMask morph(const BinaryMask& mask, int radius)
{
    if (radius == 0)
        return mask;

    // Separable square element: a row pass then a column pass.
    bool const dilate = radius > 0;
    int const r = std::abs(radius);
    int const w = mask.width();
    int const h = mask.height();

    auto pass = [&](const BinaryMask& src, bool horizontal) {
        auto out = BinaryMask(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
            {
                bool acc = !dilate;
                for (int d = -r; d <= r; ++d)
                {
                    int const sx = horizontal ? x + d : x;
                    int const sy = horizontal ? y : y + d;
                    bool const inside = sx >= 0 && sx < w && sy >= 0 && sy < h;
                    bool const v = inside && src.at(sx, sy);
                    if (dilate && v)
                    {
                        acc = true;
                        break;
                    }
                    if (!dilate && !v)
                    {
                        acc = false;
                        break;
                    }
                }
                out.set(x, y, acc);
            }
        return out;
    };
    return pass(pass(mask, true), false);
}

} // namespace fscs

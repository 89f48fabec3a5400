// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fscs
{

struct Rgb
{
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

/// 8-bit RGB raster, row-major.
class Image
{
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {0, 0, 0});
    Image(int width, int height, std::vector<std::uint8_t> pixels);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool empty() const noexcept { return pixels_.empty(); }

    [[nodiscard]] Rgb at(int x, int y) const noexcept
    {
        auto const i = offset(x, y);
        return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
    }
    void set(int x, int y, Rgb c) noexcept
    {
        auto const i = offset(x, y);
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    bool operator==(const Image&) const = default;

private:
    [[nodiscard]] std::size_t offset(int x, int y) const noexcept
    {
        return (std::size_t(y) * std::size_t(width_) + std::size_t(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

} // namespace fscs

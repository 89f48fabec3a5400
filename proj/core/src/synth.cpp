// SPDX-License-Identifier: Apache-2.0
#include "fscs/synth.hpp"

#include "fscs/dataset.hpp"
#include "fscs/error.hpp"
#include "fscs/image.hpp"
#include "fscs/image_io.hpp"
#include "fscs/rng.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <set>

namespace fscs
{

namespace
{

constexpr std::array<const char*, 12> kShapeNames {"disc", "block", "wedge", "diamond", "ring", "bar",
                                                   "cross", "slab", "orb", "kite", "hoop", "pillar"};

enum class Shape
{
    ellipse,
    rectangle,
    triangle,
    diamond,
    ring,
    bar,
    cross,
};

Shape shape_of(int class_index)
{
    static constexpr std::array<Shape, 7> kShapes {Shape::ellipse, Shape::rectangle, Shape::triangle, Shape::diamond,
                                                   Shape::ring,    Shape::bar,       Shape::cross};
    return kShapes[std::size_t(class_index) % kShapes.size()];
}

Rgb color_of(int class_index, int num_classes)
{
    // Evenly spaced hues at full saturation.
    double const h = 6.0 * double(class_index) / double(num_classes);
    int const sector = static_cast<int>(h) % 6;
    double const f = h - std::floor(h);
    auto const up = static_cast<std::uint8_t>(std::lround(40 + 200 * f));
    auto const down = static_cast<std::uint8_t>(std::lround(240 - 200 * f));
    switch (sector)
    {
        case 0: return {240, up, 40};
        case 1: return {down, 240, 40};
        case 2: return {40, 240, up};
        case 3: return {40, down, 240};
        case 4: return {up, 40, 240};
        default: return {240, 40, down};
    }
}

bool inside(Shape shape, double u, double v)
{
    // (u, v) in [-1, 1]^2 relative to the object's box.
    switch (shape)
    {
        case Shape::ellipse: return u * u + v * v <= 1.0;
        case Shape::rectangle: return true;
        case Shape::triangle: return v >= 2.0 * std::abs(u) - 1.0;
        case Shape::diamond: return std::abs(u) + std::abs(v) <= 1.0;
        case Shape::ring:
        {
            auto const r2 = u * u + v * v;
            return r2 <= 1.0 && r2 >= 0.3;
        }
        case Shape::bar: return std::abs(v) <= 0.45;
        case Shape::cross: return std::abs(u) <= 0.35 || std::abs(v) <= 0.35;
    }
    return false;
}

struct Placement
{
    int class_index;
    int x0, y0, w, h;
};

Placement place(int class_index, const SynthParams& p, Rng& rng)
{
    int const w = static_cast<int>(p.width * (0.25 + 0.25 * rng.uniform()));
    int const h = static_cast<int>(p.height * (0.25 + 0.25 * rng.uniform()));
    int const x0 = static_cast<int>(rng.index(std::size_t(p.width - w - 1))) + 1;
    int const y0 = static_cast<int>(rng.index(std::size_t(p.height - h - 1))) + 1;
    return {class_index, x0, y0, w, h};
}

void draw(Image& img, IndexedRaster& labels, const Placement& obj, int num_classes)
{
    auto const shape = shape_of(obj.class_index);
    auto const color = color_of(obj.class_index, num_classes);
    for (int y = obj.y0; y < obj.y0 + obj.h; ++y)
        for (int x = obj.x0; x < obj.x0 + obj.w; ++x)
        {
            double const u = 2.0 * (x + 0.5 - obj.x0) / obj.w - 1.0;
            double const v = 2.0 * (y + 0.5 - obj.y0) / obj.h - 1.0;
            if (!inside(shape, u, v))
                continue;
            // Mild shading so objects are not flat fills.
            auto const shade = 0.85 + 0.15 * (1.0 - std::abs(v));
            img.set(x, y,
                    {static_cast<std::uint8_t>(color.r * shade), static_cast<std::uint8_t>(color.g * shade),
                     static_cast<std::uint8_t>(color.b * shade)});
            labels.values[std::size_t(y) * std::size_t(labels.width) + std::size_t(x)] =
                static_cast<std::uint8_t>(obj.class_index + 1);
        }
}

} // namespace

void write_synthetic_dataset(const std::filesystem::path& root, const SynthParams& p)
{
    if (p.num_classes < 1 || p.num_classes > int(kShapeNames.size()) || p.num_images < p.num_classes
        || p.width < 16 || p.height < 16)
        throw Error(ErrorCode::ConfigError, "unsupported synthetic dataset parameters");

    namespace fs = std::filesystem;
    fs::create_directories(root / "images");
    fs::create_directories(root / "masks");

    auto manifest = nlohmann::json {{"classes", nlohmann::json::array()}, {"images", nlohmann::json::array()}};
    for (int c = 0; c < p.num_classes; ++c)
        manifest["classes"].push_back({{"id", c + 1}, {"name", kShapeNames[std::size_t(c)]}});

    for (int i = 0; i < p.num_images; ++i)
    {
        auto rng = Rng::keyed(fmt::format("synth|{}|{}", p.seed, i));
        auto const id = fmt::format("img_{:04d}", i);

        auto img = Image(p.width, p.height);
        for (int y = 0; y < p.height; ++y)
            for (int x = 0; x < p.width; ++x)
            {
                auto const g = static_cast<std::uint8_t>(90 + 60 * y / p.height + 20 * x / p.width);
                img.set(x, y, {g, static_cast<std::uint8_t>(g - 10), static_cast<std::uint8_t>(g - 30)});
            }
        auto labels = IndexedRaster {p.width, p.height, std::vector<std::uint8_t>(std::size_t(p.width * p.height), 0)};

        int const primary = i % p.num_classes;
        // A distractor goes down first so the primary object is never fully hidden.
        if (p.num_classes > 1 && rng.uniform() < p.second_object_prob)
        {
            int other = static_cast<int>(rng.index(std::size_t(p.num_classes - 1)));
            if (other >= primary)
                ++other;
            draw(img, labels, place(other, p, rng), p.num_classes);
        }
        draw(img, labels, place(primary, p, rng), p.num_classes);

        std::set<int> present;
        for (auto v: labels.values)
            if (v != 0)
                present.insert(v);

        save_png(root / "images" / (id + ".png"), img);
        write_file(root / "masks" / (id + ".png"), encode_indexed_png(labels));
        manifest["images"].push_back({{"id", id}, {"present", present}});
    }
    write_file(root / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace fscs

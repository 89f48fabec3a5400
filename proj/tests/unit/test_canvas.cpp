// SPDX-License-Identifier: Apache-2.0
#include "fscs/canvas.hpp"
#include "fscs/error.hpp"
#include "fscs/rng.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <thread>

namespace fscs
{
namespace
{

constexpr Rgb kWhite {255, 255, 255};
constexpr Rgb kRed {255, 0, 0};

Image fixture_image()
{
    return test::canvas_fixture_image();
}

BinaryMask fixture_mask()
{
    return test::canvas_fixture_mask();
}

std::set<std::pair<int, int>> changed_pixels(const Image& a, const Image& b)
{
    std::set<std::pair<int, int>> out;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            if (!(a.at(x, y) == b.at(x, y)))
                out.insert({x, y});
    return out;
}

OverlayStyle thin_style()
{
    auto s = OverlayStyle {};
    s.box_thickness = 1;
    return s;
}

TEST(DrawBBoxTest, ThicknessOneRedrawsExactlyThePerimeter)
{
    auto const img = Image(10, 10, kWhite);
    auto const out = draw_bbox(img, {2, 2, 6, 6}, thin_style());
    auto expected = std::set<std::pair<int, int>> {};
    for (int y = 2; y < 6; ++y)
        for (int x = 2; x < 6; ++x)
            if (x == 2 || x == 5 || y == 2 || y == 5)
                expected.insert({x, y});
    ASSERT_EQ(expected.size(), 12u);
    EXPECT_EQ(changed_pixels(img, out), expected);
    for (auto const& [x, y]: expected)
        EXPECT_EQ(out.at(x, y), kRed);
}

TEST(DrawBBoxTest, FullImageBoxRecolorsBorderRing)
{
    auto const img = Image(8, 6, kWhite);
    auto const out = draw_bbox(img, {0, 0, 8, 6}, thin_style());
    EXPECT_EQ(changed_pixels(img, out).size(), std::size_t(2 * 8 + 2 * 4));
    EXPECT_EQ(out.at(3, 3), kWhite);
}

TEST(DrawBBoxTest, ThickFrameStaysInsideBox)
{
    auto const img = Image(20, 20, kWhite);
    auto const box = BBox {3, 4, 15, 18};
    auto const out = draw_bbox(img, box, OverlayStyle {});
    for (auto const& [x, y]: changed_pixels(img, out))
    {
        EXPECT_TRUE(box.contains(x, y));
        EXPECT_TRUE(x < box.x_min + 3 || x >= box.x_max - 3 || y < box.y_min + 3 || y >= box.y_max - 3);
    }
    // frame area = box area - interior area = 12*14 - 6*8
    EXPECT_EQ(changed_pixels(img, out).size(), std::size_t(12 * 14 - 6 * 8));
}

TEST(DrawBBoxTest, DegenerateBoxIsOutOfBounds)
{
    try
    {
        (void)draw_bbox(Image(10, 10), {5, 5, 5, 9}, OverlayStyle {});
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::BoxOutOfBounds);
    }
    EXPECT_THROW((void)draw_bbox(Image(10, 10), {0, 0, 11, 5}, OverlayStyle {}), Error);
}

TEST(MaskOverlayTest, HalfAlphaOnBlackRoundsHalfUp)
{
    auto const img = Image(2, 1, Rgb {0, 0, 0});
    auto mask = BinaryMask(2, 1);
    mask.set(0, 0, true);
    auto const out = draw_mask_overlay(img, mask, OverlayStyle {});
    // 0.5*102 = 51, 0.5*204 = 102, 0.5*255 = 127.5 -> 128
    EXPECT_EQ(out.at(0, 0), (Rgb {51, 102, 128}));
    EXPECT_EQ(out.at(1, 0), (Rgb {0, 0, 0}));
}

TEST(MaskOverlayTest, AlphaZeroIsIdentityAndAlphaOneReplaces)
{
    auto const img = fixture_image();
    auto const mask = fixture_mask();
    auto style = OverlayStyle {};
    style.mask_alpha = 0.0;
    EXPECT_EQ(draw_mask_overlay(img, mask, style), img);
    style.mask_alpha = 1.0;
    auto const out = draw_mask_overlay(img, mask, style);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            EXPECT_EQ(out.at(x, y), mask.at(x, y) ? style.mask_tint : img.at(x, y));
}

TEST(MaskOverlayTest, LocalityAndBlendBounds)
{
    auto const img = fixture_image();
    auto const mask = fixture_mask();
    auto style = OverlayStyle {};
    style.mask_alpha = 0.3;
    auto const out = draw_mask_overlay(img, mask, style);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
        {
            auto const s = img.at(x, y);
            auto const o = out.at(x, y);
            if (!mask.at(x, y))
            {
                EXPECT_EQ(o, s);
                continue;
            }
            auto within = [](int v, int a, int b) { return v >= std::min(a, b) && v <= std::max(a, b); };
            EXPECT_TRUE(within(o.r, s.r, style.mask_tint.r));
            EXPECT_TRUE(within(o.g, s.g, style.mask_tint.g));
            EXPECT_TRUE(within(o.b, s.b, style.mask_tint.b));
        }
}

TEST(MaskOverlayTest, DimensionMismatch)
{
    try
    {
        (void)draw_mask_overlay(Image(4, 4), BinaryMask(4, 5), OverlayStyle {});
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(GridTest, FullGridLinesAtMultiplesIncludingZero)
{
    auto const img = Image(500, 375, Rgb {0, 0, 0});
    auto spec = GridSpec {};
    spec.draw_full_grid = true;
    spec.label_ticks = false;
    auto const out = draw_coordinate_grid(img, spec);
    auto const line = spec.line_color;
    for (int y = 0; y < 375; ++y)
        for (int x = 0; x < 500; ++x)
        {
            bool const on_line = x % 100 == 0 || y % 100 == 0;
            EXPECT_EQ(out.at(x, y) == line, on_line) << x << "," << y;
        }
}

TEST(GridTest, IntervalLargerThanImageDrawsOnlyAxes)
{
    auto const img = Image(50, 40, Rgb {0, 0, 0});
    auto spec = GridSpec {};
    spec.draw_full_grid = true;
    spec.label_ticks = false;
    spec.tick_interval = 100;
    auto const out = draw_coordinate_grid(img, spec);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 50; ++x)
            EXPECT_EQ(out.at(x, y) == spec.line_color, x == 0 || y == 0);
}

TEST(GridTest, EdgeTicksStayWithinTickLength)
{
    auto const img = Image(250, 180, Rgb {0, 0, 0});
    auto spec = GridSpec {};
    spec.label_ticks = false;
    auto const out = draw_coordinate_grid(img, spec);
    for (auto const& [x, y]: changed_pixels(img, out))
        EXPECT_TRUE((x % 100 == 0 && y < spec.tick_length) || (y % 100 == 0 && x < spec.tick_length));
    EXPECT_EQ(out.at(200, 0), spec.line_color);
    EXPECT_EQ(out.at(200, 5), spec.line_color);
    EXPECT_EQ(out.at(200, 6), (Rgb {0, 0, 0}));
}

TEST(GridTest, LabelsDrawDigitsNearTicks)
{
    auto const img = Image(250, 180, Rgb {0, 0, 0});
    auto spec = GridSpec {};
    auto const plain = [&] {
        auto s = spec;
        s.label_ticks = false;
        return draw_coordinate_grid(img, s);
    }();
    auto const labelled = draw_coordinate_grid(img, spec);
    auto const extra = changed_pixels(plain, labelled);
    EXPECT_FALSE(extra.empty());
    // "100" sits right of the x tick at 100 on the top rows; "100" for y sits below the y tick.
    bool x_label = false, y_label = false;
    for (auto const& [x, y]: extra)
    {
        x_label |= x >= 102 && x < 102 + 18 && y >= 1 && y < 8;
        y_label |= x >= 1 && x < 1 + 18 && y >= 102 && y < 109;
    }
    EXPECT_TRUE(x_label);
    EXPECT_TRUE(y_label);
}

TEST(GridTest, SmallIntervalIsRejected)
{
    auto spec = GridSpec {};
    spec.tick_interval = 7;
    EXPECT_THROW((void)draw_coordinate_grid(Image(10, 10), spec), Error);
}

TEST(ComposeTest, EmptyStylePipelineChangesOnlyBoxPerimeter)
{
    auto const img = fixture_image();
    auto const mask = fixture_mask();
    auto style = thin_style();
    style.mask_alpha = 0.0;
    auto const box = BBox {30, 20, 71, 61};
    auto const out = compose_support_panel(img, mask, box, style, std::nullopt);
    for (auto const& [x, y]: changed_pixels(img, out))
        EXPECT_TRUE(x == box.x_min || x == box.x_max - 1 || y == box.y_min || y == box.y_max - 1);
}

TEST(ComposeTest, MaskTintNeverCoversBoxFrame)
{
    auto const img = fixture_image();
    auto const mask = BinaryMask(120, 90, true);
    auto const box = BBox {10, 10, 60, 50};
    auto const out = compose_support_panel(img, mask, box, OverlayStyle {}, std::nullopt);
    for (int y = box.y_min; y < box.y_max; ++y)
        for (int x = box.x_min; x < box.x_max; ++x)
            if (x < box.x_min + 3 || x >= box.x_max - 3 || y < box.y_min + 3 || y >= box.y_max - 3)
                EXPECT_EQ(out.at(x, y), kRed);
}

TEST(ComposeTest, PurityInputsUntouched)
{
    auto const img = fixture_image();
    auto const copy = img;
    (void)compose_support_panel(img, fixture_mask(), {30, 20, 71, 61}, OverlayStyle {}, GridSpec {});
    EXPECT_EQ(img, copy);
}

using test::golden_grid;
using test::kGridGolden;
using test::kSupportGolden;

TEST(GoldenTest, GridSnapshot)
{
    auto const out = draw_coordinate_grid(fixture_image(), golden_grid());
    EXPECT_EQ(content_hash(out), kGridGolden);
    EXPECT_EQ(content_hash(draw_coordinate_grid(fixture_image(), golden_grid())), content_hash(out));
}

TEST(GoldenTest, SupportPanelSnapshot)
{
    auto const mask = fixture_mask();
    auto const out = compose_support_panel(fixture_image(), mask, tight_bbox(mask), OverlayStyle {}, golden_grid());
    EXPECT_EQ(content_hash(out), kSupportGolden);
}

TEST(GoldenTest, StableAcrossThreads)
{
    auto const mask = fixture_mask();
    auto const expected = content_hash(compose_support_panel(fixture_image(), mask, tight_bbox(mask), OverlayStyle {},
                                                             golden_grid()));
    std::vector<std::string> hashes(8);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < hashes.size(); ++i)
        threads.emplace_back([&, i] {
            hashes[i] = content_hash(
                compose_support_panel(fixture_image(), mask, tight_bbox(mask), OverlayStyle {}, golden_grid()));
        });
    for (auto& t: threads)
        t.join();
    for (auto const& h: hashes)
        EXPECT_EQ(h, expected);
}

} // namespace
} // namespace fscs

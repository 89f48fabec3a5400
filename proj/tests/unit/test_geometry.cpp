// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"
#include "fscs/geometry.hpp"
#include "fscs/mask.hpp"
#include "fscs/rng.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace fscs
{
namespace
{

using test::mask_from_rows;

TEST(BBoxTest, ValidForRespectsHalfOpenBounds)
{
    EXPECT_TRUE((BBox {0, 0, 10, 10}).valid_for(10, 10));
    EXPECT_FALSE((BBox {0, 0, 11, 10}).valid_for(10, 10));
    EXPECT_FALSE((BBox {5, 5, 5, 9}).valid_for(10, 10));
    EXPECT_FALSE((BBox {-1, 0, 4, 4}).valid_for(10, 10));
}

TEST(BBoxTest, ContainsIsMinInclusiveMaxExclusive)
{
    auto const b = BBox {2, 3, 5, 7};
    EXPECT_TRUE(b.contains(2, 3));
    EXPECT_TRUE(b.contains(4, 6));
    EXPECT_FALSE(b.contains(5, 6));
    EXPECT_FALSE(b.contains(4, 7));
    EXPECT_EQ(b.area(), 12);
}

TEST(BBoxTest, ClipBoxClampsEveryEdge)
{
    EXPECT_EQ(clip_box({190, 170, 900, 900}, 500, 375), (BBox {190, 170, 500, 375}));
    EXPECT_EQ(clip_box({-5, -5, 3, 3}, 10, 10), (BBox {0, 0, 3, 3}));
}

TEST(EdgeAdjustTest, DifferenceThenApplyWithUnitGainReachesTarget)
{
    auto const target = BBox {10, 12, 40, 30};
    auto const current = BBox {4, 20, 50, 25};
    auto const d = edge_difference(target, current);
    EXPECT_EQ(d, (EdgeAdjust {6, -8, -10, 5}));
    EXPECT_EQ(apply_edge_adjust(current, d, 1.0), target);
}

TEST(EdgeAdjustTest, HalfGainRoundsHalfUp)
{
    // 4 + 0.5*5 = 6.5 -> 7; 20 + 0.5*(-5) = 17.5 -> 18; 50 + 0.5*(-3) = 48.5 -> 49; 25 + 0.5*1 = 25.5 -> 26
    auto const moved = apply_edge_adjust({4, 20, 50, 25}, {5, -5, -3, 1}, 0.5);
    EXPECT_EQ(moved, (BBox {7, 18, 49, 26}));
}

TEST(TightBBoxTest, SinglePixel)
{
    auto m = BinaryMask(10, 10);
    m.set(3, 4, true);
    EXPECT_EQ(tight_bbox(m), (BBox {3, 4, 4, 5}));
}

TEST(TightBBoxTest, RowsAndColumnsBlock)
{
    // true on rows 2..4 and cols 1..7 (inclusive) -> (1, 2, 8, 5)
    auto m = BinaryMask(10, 10);
    for (int y = 2; y <= 4; ++y)
        for (int x = 1; x <= 7; ++x)
            m.set(x, y, true);
    EXPECT_EQ(tight_bbox(m), (BBox {1, 2, 8, 5}));
}

TEST(TightBBoxTest, FullMask)
{
    EXPECT_EQ(tight_bbox(BinaryMask(10, 10, true)), (BBox {0, 0, 10, 10}));
}

TEST(TightBBoxTest, EmptyMaskThrows)
{
    try
    {
        (void)tight_bbox(BinaryMask(4, 4));
        FAIL() << "expected EmptyMask";
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::EmptyMask);
    }
}

TEST(TightBBoxTest, EveryEdgeTouchesATruePixel)
{
    auto rng = Rng(99);
    for (int trial = 0; trial < 200; ++trial)
    {
        auto m = BinaryMask(1 + int(rng.index(20)), 1 + int(rng.index(20)));
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x)
                m.set(x, y, rng.uniform() < 0.1);
        if (m.none())
            m.set(0, 0, true);
        auto const b = tight_bbox(m);
        bool left = false, right = false, top = false, bottom = false;
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x)
                if (m.at(x, y))
                {
                    ASSERT_TRUE(b.contains(x, y));
                    left |= x == b.x_min;
                    right |= x == b.x_max - 1;
                    top |= y == b.y_min;
                    bottom |= y == b.y_max - 1;
                }
        EXPECT_TRUE(left && right && top && bottom);
    }
}

TEST(MaskTest, ClippedToKeepsOnlyBoxPixels)
{
    auto const m = mask_from_rows({
        "####",
        "####",
        "####",
    });
    auto const c = m.clipped_to({1, 1, 3, 3});
    EXPECT_EQ(c, mask_from_rows({
                     "....",
                     ".##.",
                     ".##.",
                 }));
}

TEST(MaskTest, AndOrRequireSameShape)
{
    EXPECT_THROW((void)(BinaryMask(2, 2) & BinaryMask(3, 2)), Error);
    auto const a = mask_from_rows({"#.", ".."});
    auto const b = mask_from_rows({"##", ".."});
    EXPECT_EQ((a & b).count(), 1);
    EXPECT_EQ((a | b).count(), 2);
}

TEST(MorphTest, DilateAndErodeSquareElement)
{
    auto const m = mask_from_rows({
        ".....",
        ".....",
        "..#..",
        ".....",
        ".....",
    });
    auto const grown = morph(m, 1);
    EXPECT_EQ(grown, mask_from_rows({
                         ".....",
                         ".###.",
                         ".###.",
                         ".###.",
                         ".....",
                     }));
    EXPECT_EQ(morph(grown, -1), m);
    EXPECT_EQ(morph(m, 0), m);
}

TEST(MorphTest, ErosionTreatsOutsideAsFalse)
{
    EXPECT_EQ(morph(BinaryMask(3, 3, true), -1), mask_from_rows({"...", ".#.", "..."}));
}

} // namespace
} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#include "fscs/oracle.hpp"

#include "fscs/error.hpp"
#include "fscs/image_io.hpp"
#include "fscs/mask_codec.hpp"
#include "fscs/metrics.hpp"
#include "fscs/rng.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace fscs
{

using nlohmann::json;

void validate(const NoiseModel& noise)
{
    if (noise.box_scale_sigma < 0 || noise.box_jitter_sigma < 0)
        throw Error(ErrorCode::ConfigError, "noise sigmas must be non-negative");
    if (noise.flip_presence_prob < 0 || noise.flip_presence_prob > 1)
        throw Error(ErrorCode::ConfigError, "flip_presence_prob must lie in [0, 1]");
}

namespace
{

const BinaryMask& gt_mask(const Episode& episode, ClassId id)
{
    auto it = episode.gt_masks.find(id);
    if (it == episode.gt_masks.end())
        throw Error(ErrorCode::KeyMismatch, "class " + to_string(id) + " is not part of the episode");
    return it->second;
}

BBox centered_half_box(int width, int height)
{
    return {width / 4, height / 4, std::max(width / 4 + 1, width - width / 4),
            std::max(height / 4 + 1, height - height / 4)};
}

/// Clipped box with at least one pixel on each axis.
BBox force_valid(BBox b, int width, int height)
{
    b = clip_box(b, width, height);
    if (b.x_max <= b.x_min)
    {
        b.x_min = std::min(b.x_min, width - 1);
        b.x_max = b.x_min + 1;
    }
    if (b.y_max <= b.y_min)
    {
        b.y_min = std::min(b.y_min, height - 1);
        b.y_max = b.y_min + 1;
    }
    return b;
}

int round_half_up(double v)
{
    return static_cast<int>(std::floor(v + 0.5));
}

std::string position_word(double cx, double cy)
{
    auto const col = cx < 1.0 / 3 ? "left" : cx < 2.0 / 3 ? "center" : "right";
    auto const row = cy < 1.0 / 3 ? "top" : cy < 2.0 / 3 ? "middle" : "bottom";
    return fmt::format("{} {}", row, col);
}

} // namespace

QuestResult oracle_quester(const Episode& episode, ClassId class_id, const NoiseModel& noise,
                           const std::optional<QuestFeedback>& feedback)
{
    auto const& gt = gt_mask(episode, class_id);
    auto const gt_present = episode.gt_presence.at(class_id);
    auto const w = gt.width();
    auto const h = gt.height();

    // Presence and the initial box come from one stream keyed on iteration 0, so refinement
    // never re-rolls presence.
    auto rng = Rng::keyed(fmt::format("quest|{}|{}|{}|0", noise.seed, episode.episode_id, class_id.value));
    auto const flip = rng.uniform() < noise.flip_presence_prob;
    auto const z_scale = rng.normal();
    auto const z_x = rng.normal();
    auto const z_y = rng.normal();

    auto result = QuestResult {};
    result.class_id = class_id;
    result.present = gt_present != flip;
    if (result.present)
    {
        if (feedback)
        {
            result.bbox = force_valid(apply_edge_adjust(feedback->previous_box, feedback->adjust, feedback->gain), w,
                                      h);
        }
        else
        {
            auto const base = gt_present ? tight_bbox(gt) : centered_half_box(w, h);
            auto const s = std::exp(noise.box_scale_sigma * z_scale);
            auto const bw = double(base.width());
            auto const bh = double(base.height());
            auto const cx = (base.x_min + base.x_max) / 2.0 + noise.box_jitter_sigma * bw * z_x;
            auto const cy = (base.y_min + base.y_max) / 2.0 + noise.box_jitter_sigma * bh * z_y;
            auto box = BBox {round_half_up(cx - bw * s / 2), round_half_up(cy - bh * s / 2),
                             round_half_up(cx + bw * s / 2), round_half_up(cy + bh * s / 2)};
            result.bbox = force_valid(box, w, h);
        }
        result.confidence = 1.0;
    }
    result.raw = to_json(result).dump();
    return result;
}

BinaryMask oracle_segmenter(const Episode& episode, ClassId class_id, const BBox& box, const NoiseModel& noise,
                            int iteration)
{
    auto const& gt = gt_mask(episode, class_id);
    auto const clipped = clip_box(box, gt.width(), gt.height());
    auto mask = gt.clipped_to(clipped);
    if (noise.mask_boundary_radius != 0)
    {
        auto rng = Rng::keyed(
            fmt::format("segment|{}|{}|{}|{}", noise.seed, episode.episode_id, class_id.value, iteration));
        auto const sign = rng.uniform() < 0.5 ? -1 : 1;
        mask = morph(mask, sign * std::abs(noise.mask_boundary_radius)).clipped_to(clipped);
    }
    return mask;
}

Judgement oracle_judge(const Episode& episode, ClassId class_id, const BinaryMask& mask, const BBox& current_box,
                       double threshold)
{
    auto const& gt = gt_mask(episode, class_id);
    auto const score = iou(mask, gt);
    auto const gt_area = gt.count();

    auto j = Judgement {};
    j.criteria_scores = CriteriaScores {
        score, gt_area > 0 ? double((mask & gt).count()) / double(gt_area) : (mask.none() ? 1.0 : 0.0),
        episode.gt_presence.at(class_id) ? 1.0 : 0.0};
    if (score >= threshold)
    {
        j.verdict = Verdict::good;
        j.critique = fmt::format("Mask matches the object well (IoU {:.3f}).", score);
        return j;
    }
    j.verdict = Verdict::bad;
    j.critique = fmt::format("Mask does not match the object (IoU {:.3f}).", score);
    if (gt_area > 0)
        j.suggestion = edge_difference(tight_bbox(gt), current_box);
    else
        j.suggestion = std::string("No instance of this class is visible; the box cannot be improved.");
    return j;
}

CognitiveProfile oracle_cognizer(const Episode& episode, ClassId class_id)
{
    auto const& group = episode.group(class_id);
    auto p = CognitiveProfile {};
    p.class_id = class_id;
    p.class_name = group.class_name;

    double area = 0, aspect = 0, cx = 0, cy = 0;
    for (auto const& ex: group.examples)
    {
        auto const w = double(ex.mask.width());
        auto const h = double(ex.mask.height());
        area += double(ex.mask.count()) / (w * h);
        aspect += double(ex.bbox.width()) / double(ex.bbox.height());
        cx += (ex.bbox.x_min + ex.bbox.x_max) / (2.0 * w);
        cy += (ex.bbox.y_min + ex.bbox.y_max) / (2.0 * h);
    }
    auto const n = double(std::max<std::size_t>(1, group.examples.size()));
    area /= n;
    aspect /= n;
    cx /= n;
    cy /= n;

    auto const shape = aspect > 1.5 ? "wide" : aspect < 1 / 1.5 ? "tall" : "compact";
    p.description = fmt::format("A {} {} covering about {:.0f}% of the image.", shape, group.class_name, area * 100);
    p.attributes = {fmt::format("aspect ratio {:.2f}", aspect), fmt::format("relative area {:.3f}", area)};
    p.spatial_notes = fmt::format("Usually found near the {} of the frame.", position_word(cx, cy));
    return p;
}

ToolResponse OracleBackend::attempt(const ToolRequest& request)
{
    auto const& ctx = request.context;
    auto r = ToolResponse {};

    if (request.tool == ToolKind::segment)
    {
        auto const& q = std::get<SegmentQuery>(request.payload);
        for (auto const& box: q.boxes)
        {
            BinaryMask mask;
            if (ctx.episode != nullptr && ctx.class_id)
            {
                mask = oracle_segmenter(*ctx.episode, *ctx.class_id, box, noise_, ctx.iteration);
            }
            else
            {
                // No ground truth in reach: the box itself is the best available mask.
                auto const image = decode_png(q.image_png);
                mask = BinaryMask(image.width(), image.height(), true).clipped_to(box);
            }
            r.masks_rle.push_back(encode_mask(mask, MaskFormat::rle));
        }
        return r;
    }

    if (ctx.stage == Stage::plan)
    {
        r.text = "```json\n" + to_json(canonical_plan()).dump(2) + "\n```";
        return r;
    }
    if (ctx.episode == nullptr || !ctx.class_id)
    {
        r.status = ToolStatus::fatal_error;
        r.error = "oracle backend needs an episode and class in the request context";
        return r;
    }

    auto const& ep = *ctx.episode;
    auto const c = *ctx.class_id;
    switch (ctx.stage)
    {
        case Stage::cognize: r.text = to_json(oracle_cognizer(ep, c)).dump(); break;
        case Stage::quest:
        {
            auto feedback = std::optional<QuestFeedback> {};
            if (ctx.feedback && ctx.current_box)
                feedback = QuestFeedback {*ctx.current_box, *ctx.feedback, ctx.feedback_gain};
            r.text = oracle_quester(ep, c, noise_, feedback).raw;
            break;
        }
        case Stage::judge:
        {
            if (ctx.mask == nullptr || !ctx.current_box)
            {
                r.status = ToolStatus::fatal_error;
                r.error = "oracle judge needs the mask and box under review";
                return r;
            }
            r.text = to_json(oracle_judge(ep, c, *ctx.mask, *ctx.current_box, ctx.judge_threshold)).dump();
            break;
        }
        default:
            r.status = ToolStatus::fatal_error;
            r.error = fmt::format("oracle cannot answer stage {}", to_string(ctx.stage));
    }
    return r;
}

} // namespace fscs

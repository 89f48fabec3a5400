// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/episode.hpp"
#include "fscs/prompts.hpp"
#include "fscs/toolkit.hpp"

#include <cstdint>
#include <optional>

namespace fscs
{

/// Perturbations applied by the oracle backends. All zero = ground truth.
struct NoiseModel
{
    double box_scale_sigma = 0;
    double box_jitter_sigma = 0;
    int mask_boundary_radius = 0;
    double flip_presence_prob = 0;
    std::uint64_t seed = 0;
};

void validate(const NoiseModel& noise);

struct QuestFeedback
{
    BBox previous_box;
    EdgeAdjust adjust;
    double gain = 0.5;
};

/// Presence and box from ground truth plus seeded noise. With feedback, the previous box
/// moves by gain * adjust instead of being redrawn.
QuestResult oracle_quester(const Episode& episode, ClassId class_id, const NoiseModel& noise,
                           const std::optional<QuestFeedback>& feedback = std::nullopt);

/// Ground-truth mask clipped to the box, then dilated or eroded by the boundary radius.
BinaryMask oracle_segmenter(const Episode& episode, ClassId class_id, const BBox& box, const NoiseModel& noise,
                            int iteration = 0);

/// GOOD iff IoU(mask, gt) >= threshold; BAD carries EdgeAdjust = gt tight box - current box.
Judgement oracle_judge(const Episode& episode, ClassId class_id, const BinaryMask& mask, const BBox& current_box,
                       double threshold);

/// Description derived from support masks (size, aspect, position).
CognitiveProfile oracle_cognizer(const Episode& episode, ClassId class_id);

/// Serves all three tool kinds from episode ground truth. Responses use the same
/// JSON formats the parsers accept from live models.
class OracleBackend final : public ToolBackend
{
public:
    explicit OracleBackend(NoiseModel noise): noise_(noise) {}

    ToolResponse attempt(const ToolRequest& request) override;

    [[nodiscard]] const NoiseModel& noise() const noexcept { return noise_; }

private:
    NoiseModel noise_;
};

} // namespace fscs

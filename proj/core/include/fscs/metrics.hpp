// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/class_id.hpp"
#include "fscs/episode.hpp"
#include "fscs/mask.hpp"
#include "fscs/prediction.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fscs
{

/// |a & b| / |a | b|; 1.0 when both are empty. Throws DimensionMismatch.
double iou(const BinaryMask& a, const BinaryMask& b);

struct EpisodeScore
{
    std::string episode_id;
    bool exact_match = false;
    std::map<ClassId, double> per_class_iou; ///< classes present in ground truth or prediction
    bool failed = false;

    bool operator==(const EpisodeScore&) const = default;
};

/// Throws KeyMismatch when the prediction's classes differ from the episode's.
EpisodeScore score_episode(const Episode& episode, const Prediction& prediction);

enum class MiouMode
{
    flat,            ///< mean over every (episode, class) pair
    per_class_macro, ///< mean over classes of per-class means
};

struct FoldStats
{
    double exact_ratio_pct = 0;
    double miou_pct = 0;
    int episode_count = 0;
    int failure_count = 0;

    bool operator==(const FoldStats&) const = default;
};

struct MetricsReport
{
    std::string method = "Ours";
    std::string setting; ///< e.g. "1-way 1-shot"
    std::map<int, FoldStats> per_fold;
    double avg_exact_ratio_pct = 0;
    double avg_miou_pct = 0;

    bool operator==(const MetricsReport&) const = default;
};

/// `fold_of_episode[i]` is the fold of `scores[i]`. Throws EmptyInput.
MetricsReport aggregate(std::span<const EpisodeScore> scores, std::span<const int> fold_of_episode,
                        MiouMode mode = MiouMode::flat);

enum class ReportFormat
{
    text_table,
    json,
    csv,
};

/// Text table with fold columns 5^f and avg. for each metric group, one row per report.
std::string render_report(std::span<const MetricsReport> rows, ReportFormat format);
std::string render_report(const MetricsReport& report, ReportFormat format);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

} // namespace fscs

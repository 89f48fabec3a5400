// SPDX-License-Identifier: Apache-2.0
#include "fscs/metrics.hpp"

#include "fscs/error.hpp"

#include <fmt/format.h>

#include <set>

namespace fscs
{

double iou(const BinaryMask& a, const BinaryMask& b)
{
    if (!a.same_shape(b))
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("iou of {}x{} and {}x{} masks", a.width(), a.height(), b.width(), b.height()));
    std::int64_t inter = 0, uni = 0;
    auto const x = a.bits();
    auto const y = b.bits();
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        inter += x[i] & y[i];
        uni += x[i] | y[i];
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

EpisodeScore score_episode(const Episode& episode, const Prediction& prediction)
{
    auto keys = [](auto const& map) {
        auto out = std::set<ClassId> {};
        for (auto const& [k, v]: map)
            out.insert(k);
        return out;
    };
    auto const expected = keys(episode.gt_presence);
    if (keys(prediction.presence) != expected || keys(prediction.masks) != expected)
        throw Error(ErrorCode::KeyMismatch,
                    fmt::format("prediction classes differ from episode {} classes", episode.episode_id));

    auto s = EpisodeScore {};
    s.episode_id = episode.episode_id;
    s.failed = prediction.failed;
    s.exact_match = !prediction.failed;
    for (auto const& [id, gt_present]: episode.gt_presence)
    {
        auto const predicted = prediction.presence.at(id);
        if (prediction.failed)
        {
            if (gt_present)
                s.per_class_iou[id] = 0.0;
            continue;
        }
        if (predicted != gt_present)
            s.exact_match = false;
        if (gt_present || predicted)
            s.per_class_iou[id] = iou(prediction.masks.at(id), episode.gt_masks.at(id));
    }
    return s;
}

MetricsReport aggregate(std::span<const EpisodeScore> scores, std::span<const int> fold_of_episode, MiouMode mode)
{
    if (scores.empty())
        throw Error(ErrorCode::EmptyInput, "no episode scores to aggregate");
    if (scores.size() != fold_of_episode.size())
        throw Error(ErrorCode::KeyMismatch, "one fold per score is required");

    struct Acc
    {
        int episodes = 0;
        int exact = 0;
        int failures = 0;
        std::vector<double> ious;
        std::map<ClassId, std::vector<double>> by_class;
    };
    auto folds = std::map<int, Acc> {};
    for (std::size_t i = 0; i < scores.size(); ++i)
    {
        auto& acc = folds[fold_of_episode[i]];
        auto const& s = scores[i];
        ++acc.episodes;
        acc.exact += s.exact_match ? 1 : 0;
        acc.failures += s.failed ? 1 : 0;
        for (auto const& [id, v]: s.per_class_iou)
        {
            acc.ious.push_back(v);
            acc.by_class[id].push_back(v);
        }
    }

    auto mean = [](const std::vector<double>& v) {
        double sum = 0;
        for (auto x: v)
            sum += x;
        return v.empty() ? 0.0 : sum / double(v.size());
    };

    auto report = MetricsReport {};
    double exact_sum = 0, miou_sum = 0;
    for (auto const& [fold, acc]: folds)
    {
        auto stats = FoldStats {};
        stats.episode_count = acc.episodes;
        stats.failure_count = acc.failures;
        stats.exact_ratio_pct = 100.0 * acc.exact / acc.episodes;
        if (mode == MiouMode::flat)
        {
            stats.miou_pct = 100.0 * mean(acc.ious);
        }
        else
        {
            auto per_class = std::vector<double> {};
            for (auto const& [id, v]: acc.by_class)
                per_class.push_back(mean(v));
            stats.miou_pct = 100.0 * mean(per_class);
        }
        exact_sum += stats.exact_ratio_pct;
        miou_sum += stats.miou_pct;
        report.per_fold[fold] = stats;
    }
    report.avg_exact_ratio_pct = exact_sum / double(folds.size());
    report.avg_miou_pct = miou_sum / double(folds.size());
    return report;
}

} // namespace fscs

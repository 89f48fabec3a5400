// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"
#include "fscs/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace fscs
{

using nlohmann::json;

json to_json(const MetricsReport& r)
{
    auto folds = json::object();
    for (auto const& [fold, s]: r.per_fold)
        folds[std::to_string(fold)] = {{"exact_ratio_pct", s.exact_ratio_pct},
                                       {"miou_pct", s.miou_pct},
                                       {"episode_count", s.episode_count},
                                       {"failure_count", s.failure_count}};
    return {{"method", r.method},
            {"setting", r.setting},
            {"per_fold", folds},
            {"avg_exact_ratio_pct", r.avg_exact_ratio_pct},
            {"avg_miou_pct", r.avg_miou_pct}};
}

MetricsReport report_from_json(const json& j)
{
    try
    {
        auto r = MetricsReport {};
        r.method = j.at("method").get<std::string>();
        r.setting = j.value("setting", "");
        for (auto const& [k, v]: j.at("per_fold").items())
            r.per_fold[std::stoi(k)] = FoldStats {v.at("exact_ratio_pct").get<double>(), v.at("miou_pct").get<double>(),
                                                  v.at("episode_count").get<int>(), v.at("failure_count").get<int>()};
        r.avg_exact_ratio_pct = j.at("avg_exact_ratio_pct").get<double>();
        r.avg_miou_pct = j.at("avg_miou_pct").get<double>();
        return r;
    }
    catch (const std::exception& e)
    {
        throw Error(ErrorCode::MalformedEncoding, std::string("metrics report: ") + e.what());
    }
}

namespace
{

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    auto out = std::string("\"");
    for (auto c: s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string render_csv(std::span<const MetricsReport> rows)
{
    auto out = std::string("method,setting,fold,exact_ratio_pct,miou_pct,episode_count,failure_count\n");
    for (auto const& r: rows)
    {
        for (auto const& [fold, s]: r.per_fold)
            out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.method), csv_field(r.setting), fold,
                               s.exact_ratio_pct, s.miou_pct, s.episode_count, s.failure_count);
        out += fmt::format("{},{},avg,{},{},,\n", csv_field(r.method), csv_field(r.setting), r.avg_exact_ratio_pct,
                           r.avg_miou_pct);
    }
    return out;
}

std::string render_table(std::span<const MetricsReport> rows)
{
    auto fold_set = std::set<int> {};
    for (auto const& r: rows)
        for (auto const& [fold, s]: r.per_fold)
            fold_set.insert(fold);
    auto const folds = std::vector<int>(fold_set.begin(), fold_set.end());

    auto method_w = std::size_t {6};
    for (auto const& r: rows)
        method_w = std::max(method_w, r.method.size());

    constexpr std::size_t cell = 6;
    auto group_cells = [&](const MetricsReport* r, bool exact) {
        auto out = std::string {};
        for (auto fold: folds)
        {
            auto text = std::string {};
            if (r == nullptr)
                text = fmt::format("5^{}", fold);
            else if (auto it = r->per_fold.find(fold); it != r->per_fold.end())
                text = fmt::format("{:.1f}", exact ? it->second.exact_ratio_pct : it->second.miou_pct);
            else
                text = "-";
            out += fmt::format("{:>{}}", text, cell);
        }
        auto const avg = r == nullptr ? std::string("avg.")
                                      : fmt::format("{:.1f}", exact ? r->avg_exact_ratio_pct : r->avg_miou_pct);
        return out + fmt::format("{:>{}}", avg, cell);
    };

    auto const group_w = cell * (folds.size() + 1);
    auto const exact_title = std::string("classification 0/1 exact ratio (%)");
    auto const seg_title = std::string("segmentation mIoU (%)");
    auto const left_w = std::max(group_w, exact_title.size());
    auto const right_w = std::max(group_w, seg_title.size());

    auto line = [&](const std::string& method, const std::string& a, const std::string& b) {
        auto s = fmt::format("{:<{}} | {:<{}} | {:<{}}", method, method_w, a, left_w, b, right_w);
        while (!s.empty() && s.back() == ' ')
            s.pop_back();
        return s + "\n";
    };

    auto out = std::string {};
    auto const setting = rows.empty() ? std::string {} : rows.front().setting;
    if (!setting.empty())
        out += fmt::format("{:<{}} | {}\n", "", method_w, setting);
    out += fmt::format("{:<{}} | {:<{}} | {}\n", "", method_w, exact_title, left_w, seg_title);
    out += line("Method", group_cells(nullptr, true), group_cells(nullptr, false));
    out += std::string(method_w + left_w + right_w + 6, '-') + "\n";
    for (auto const& r: rows)
        out += line(r.method, group_cells(&r, true), group_cells(&r, false));
    return out;
}

} // namespace

std::string render_report(std::span<const MetricsReport> rows, ReportFormat format)
{
    switch (format)
    {
        case ReportFormat::text_table: return render_table(rows);
        case ReportFormat::csv: return render_csv(rows);
        case ReportFormat::json:
        {
            auto arr = json::array();
            for (auto const& r: rows)
                arr.push_back(to_json(r));
            return arr.dump(2) + "\n";
        }
    }
    return {};
}

std::string render_report(const MetricsReport& report, ReportFormat format)
{
    if (format == ReportFormat::json)
        return to_json(report).dump(2) + "\n";
    return render_report(std::span<const MetricsReport>(&report, 1), format);
}

} // namespace fscs

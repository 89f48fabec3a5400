// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include "fscs/error.hpp"
#include "fscs/image_io.hpp"
#include "fscs/prompts.hpp"
#include "fscs/synth.hpp"

#include <fmt/format.h>

#include <unistd.h>

namespace fscs::test
{

std::filesystem::path temp_dir(std::string_view name)
{
    auto const dir = std::filesystem::temp_directory_path()
                     / ("fscs-test-" + std::to_string(::getpid()) + "-" + std::string(name));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const std::filesystem::path& synth_root()
{
    static auto const root = [] {
        auto dir = temp_dir("synth");
        write_synthetic_dataset(dir);
        return dir;
    }();
    return root;
}

const DatasetIndex& synth_index()
{
    static auto const index = load_dataset(synth_root());
    return index;
}

BinaryMask mask_from_rows(const std::vector<std::string>& rows)
{
    auto m = BinaryMask(int(rows.front().size()), int(rows.size()));
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            m.set(x, y, rows[std::size_t(y)][std::size_t(x)] == '#');
    return m;
}

Image canvas_fixture_image()
{
    auto img = Image(120, 90);
    for (int y = 0; y < 90; ++y)
        for (int x = 0; x < 120; ++x)
            img.set(x, y, {std::uint8_t(x * 2), std::uint8_t(y * 2), std::uint8_t((x + y) % 256)});
    return img;
}

BinaryMask canvas_fixture_mask()
{
    auto m = BinaryMask(120, 90);
    for (int y = 0; y < 90; ++y)
        for (int x = 0; x < 120; ++x)
        {
            auto const dx = x - 50, dy = y - 40;
            m.set(x, y, dx * dx + dy * dy <= 400);
        }
    return m;
}

GridSpec golden_grid()
{
    auto spec = GridSpec {};
    spec.tick_interval = 40;
    spec.label_size = 14;
    return spec;
}

double naive_iou(const BinaryMask& a, const BinaryMask& b)
{
    long inter = 0;
    long uni = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
        {
            if (a.at(x, y) && b.at(x, y))
                ++inter;
            if (a.at(x, y) || b.at(x, y))
                ++uni;
        }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

BinaryMask random_mask(Rng& rng, int width, int height, double density)
{
    auto m = BinaryMask(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            m.set(x, y, rng.uniform() < density);
    return m;
}

MetricsReport paper_row_report()
{
    auto r = MetricsReport {};
    r.method = "Ours";
    r.setting = "1-way 1-shot";
    r.per_fold = {{0, {93.5, 37.3, 0, 0}}, {1, {80.3, 45.5, 0, 0}}, {2, {84.4, 34.2, 0, 0}}, {3, {87.3, 35.6, 0, 0}}};
    r.avg_exact_ratio_pct = 86.4;
    r.avg_miou_pct = 38.2;
    return r;
}

namespace
{

std::string check_accepted(const nlohmann::json& e)
{
    auto const raw = e.at("raw").get<std::string>();
    auto const parser = e.at("parser").get<std::string>();
    if (parser == "quest")
    {
        auto const dims = ImageDims {e.at("image")[0].get<int>(), e.at("image")[1].get<int>()};
        auto const q = parse_quest(raw, dims);
        if (q.present != e.at("present").get<bool>())
            return "presence differs";
        if (!q.present)
            return q.bbox ? "absent result carries a box" : "";
        auto const& b = e.at("bbox");
        auto const want = BBox {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
        return q.bbox == want ? "" : fmt::format("box {} != {}", to_string(*q.bbox), to_string(want));
    }
    if (parser == "judge")
    {
        auto const j = parse_judgement(raw);
        auto const verdict = j.verdict == Verdict::good ? "GOOD" : "BAD";
        if (verdict != e.at("verdict").get<std::string>())
            return fmt::format("verdict {}", verdict);
        if (e.contains("edge_adjust"))
        {
            auto const* a = j.suggestion ? std::get_if<EdgeAdjust>(&*j.suggestion) : nullptr;
            auto const& w = e.at("edge_adjust");
            if (!a || a->dx_min != w[0].get<int>() || a->dy_min != w[1].get<int>() || a->dx_max != w[2].get<int>()
                || a->dy_max != w[3].get<int>())
                return "edge adjustment differs";
        }
        if (e.contains("text"))
        {
            auto const* t = j.suggestion ? std::get_if<std::string>(&*j.suggestion) : nullptr;
            if (!t || *t != e.at("text").get<std::string>())
                return "text suggestion differs";
        }
        if (e.contains("scores"))
        {
            auto const& w = e.at("scores");
            auto const& s = j.criteria_scores;
            if (!s || s->shape_conformity != w[0].get<double>() || s->coverage != w[1].get<double>()
                || s->class_confidence != w[2].get<double>())
                return "criteria scores differ";
        }
        return "";
    }
    auto const plan = parse_plan(raw);
    auto stages = std::vector<std::string> {};
    for (auto const& step: plan)
        stages.emplace_back(to_string(step.stage));
    return stages == e.at("stages").get<std::vector<std::string>>() ? "" : "stage list differs";
}

} // namespace

std::string check_parser_case(const nlohmann::json& entry)
{
    auto const accept = entry.at("expect").get<std::string>() == "accept";
    try
    {
        auto const problem = check_accepted(entry);
        if (!accept)
            return "accepted a response that must be rejected";
        return problem;
    }
    catch (const Error& e)
    {
        if (accept)
            return fmt::format("rejected: {}", e.what());
        auto const want = entry.at("error").get<std::string>();
        return to_string(e.code()) == want ? "" : fmt::format("wrong error {}, want {}", to_string(e.code()), want);
    }
}

nlohmann::json load_parser_corpus()
{
    return nlohmann::json::parse(read_file(std::filesystem::path(FSCS_FIXTURE_DIR) / "parser_corpus.json"));
}

} // namespace fscs::test

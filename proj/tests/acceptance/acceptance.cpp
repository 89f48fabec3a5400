// SPDX-License-Identifier: Apache-2.0
#include "fscs/agent.hpp"
#include "fscs/canvas.hpp"
#include "fscs/metrics.hpp"
#include "fscs/oracle.hpp"
#include "fscs/transcript.hpp"

#include "test_support.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace
{

using namespace fscs;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

/// `per_fold` episodes from each of the four folds, 1-way 1-shot.
std::vector<Episode> one_shot_episodes(std::uint64_t seed, int total)
{
    auto out = std::vector<Episode> {};
    auto const& index = test::synth_index();
    for (int fold = 0; fold < index.num_folds(); ++fold)
    {
        auto const count = total / index.num_folds() + (fold < total % index.num_folds() ? 1 : 0);
        auto part = sample_episodes(index, {1, 1, fold, seed, count});
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::vector<EpisodeResult> run_oracle(const std::vector<Episode>& episodes, const NoiseModel& noise,
                                      const AgentConfig& config, int parallelism = 1)
{
    auto oracle = std::make_shared<OracleBackend>(noise);
    auto backends = Backends {oracle, oracle, oracle, nullptr};
    return run_batch(episodes, backends, config, parallelism, TemplateSet::defaults(),
                     test::synth_index().fingerprint());
}

MetricsReport score_all(const std::vector<Episode>& episodes, const std::vector<EpisodeResult>& results)
{
    auto scores = std::vector<EpisodeScore> {};
    auto folds = std::vector<int> {};
    for (std::size_t i = 0; i < episodes.size(); ++i)
    {
        scores.push_back(score_episode(episodes[i], results[i].prediction));
        folds.push_back(episodes[i].spec.fold);
    }
    return aggregate(scores, folds);
}

double mean_miou(const std::vector<Episode>& episodes, const std::vector<EpisodeResult>& results)
{
    double sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < episodes.size(); ++i)
        for (auto const& [id, v]: score_episode(episodes[i], results[i].prediction).per_class_iou)
        {
            sum += v;
            ++n;
        }
    return n == 0 ? 0.0 : 100.0 * sum / n;
}

// P1 and the transcripts P6 / P10 reuse.
struct P1Data
{
    std::vector<Episode> episodes;
    std::vector<EpisodeResult> results;
    AgentConfig config;
};

P1Data& p1_data()
{
    static P1Data data = [] {
        auto d = P1Data {};
        d.episodes = one_shot_episodes(1, 50);
        d.config.judge_threshold = 0.9;
        return d;
    }();
    return data;
}

Outcome p1()
{
    auto& d = p1_data();
    auto const start = std::chrono::steady_clock::now();
    d.results = run_oracle(d.episodes, NoiseModel {}, d.config, 1);
    auto const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto const report = score_all(d.episodes, d.results);
    auto refinements = 0;
    for (auto const& r: d.results)
        for (auto const& s: r.transcript.steps)
            refinements += s.stage == Stage::quest && s.iteration > 0;
    auto const pass = d.episodes.size() == 50 && report.avg_exact_ratio_pct == 100.0 && report.avg_miou_pct >= 99.0
                      && seconds < 30.0 && refinements == 0;
    return {pass, fmt::format("{} episodes, exact {:.1f}%, mIoU {:.2f}%, {} refinements, {:.2f} s", d.episodes.size(),
                              report.avg_exact_ratio_pct, report.avg_miou_pct, refinements, seconds)};
}

Outcome p2()
{
    auto const episodes = one_shot_episodes(2, 100);
    auto config = AgentConfig {};
    config.feedback_gain = 0.5;
    config.judge_threshold = 0.9;
    config.max_refinements_per_class = 8;
    auto const noise = NoiseModel {0.4, 0.2, 0, 0, 2};
    auto const results = run_oracle(episodes, noise, config);

    int transitions = 0;
    int violations = 0;
    int good = 0;
    int measured = 0;
    for (std::size_t i = 0; i < episodes.size(); ++i)
    {
        auto const& ep = episodes[i];
        for (auto const id: ep.class_ids())
        {
            auto const& gt = ep.gt_masks.at(id);
            if (gt.none())
                continue;
            auto const target = tight_bbox(gt);
            auto boxes = std::vector<BBox> {};
            for (auto const& s: results[i].transcript.steps)
                if (s.stage == Stage::quest && s.class_id == id && s.parsed_summary.contains("bbox"))
                {
                    auto const& b = s.parsed_summary.at("bbox");
                    boxes.push_back({b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()});
                }
            for (std::size_t t = 1; t < boxes.size(); ++t)
            {
                auto const& prev = boxes[t - 1];
                auto const& next = boxes[t];
                auto const prev_e = std::array {target.x_min - prev.x_min, target.y_min - prev.y_min,
                                                target.x_max - prev.x_max, target.y_max - prev.y_max};
                auto const prev_v = std::array {prev.x_min, prev.y_min, prev.x_max, prev.y_max};
                auto const next_v = std::array {next.x_min, next.y_min, next.x_max, next.y_max};
                auto const next_e = std::array {target.x_min - next.x_min, target.y_min - next.y_min,
                                                target.x_max - next.x_max, target.y_max - next.y_max};
                for (std::size_t k = 0; k < 4; ++k)
                {
                    auto const exact = int(std::floor(prev_v[k] + 0.5 * prev_e[k] + 0.5));
                    if (next_v[k] != exact || std::abs(next_e[k] - 0.5 * prev_e[k]) > 0.5)
                        ++violations;
                }
                ++transitions;
            }
            ++measured;
            good += iou(results[i].prediction.masks.at(id), gt) >= 0.9;
        }
    }
    auto const share = measured == 0 ? 0.0 : 100.0 * good / measured;
    auto const pass = violations == 0 && transitions > 0 && share >= 95.0;
    return {pass, fmt::format("{} refinement steps, {} edge violations, IoU >= 0.9 on {:.1f}% of {} episodes",
                              transitions, violations, share, measured)};
}

Outcome p3()
{
    auto const episodes = one_shot_episodes(3, 100);
    auto config = AgentConfig {};
    config.max_refinements_per_class = 0;
    auto values = std::vector<double> {};
    for (double sigma: {0.0, 0.2, 0.4, 0.8})
        values.push_back(mean_miou(episodes, run_oracle(episodes, NoiseModel {sigma, 0, 0, 0, 3}, config)));
    auto pass = true;
    for (std::size_t i = 1; i < values.size(); ++i)
        pass = pass && values[i] <= values[i - 1];
    return {pass, fmt::format("mIoU at sigma 0/0.2/0.4/0.8: {:.2f} / {:.2f} / {:.2f} / {:.2f}", values[0], values[1],
                              values[2], values[3])};
}

Outcome p4()
{
    auto const episodes = one_shot_episodes(4, 100);
    auto const noise = NoiseModel {0.4, 0, 0, 0, 4};
    auto without = AgentConfig {};
    without.max_refinements_per_class = 0;
    auto with = AgentConfig {};
    with.max_refinements_per_class = 3;
    auto const a = mean_miou(episodes, run_oracle(episodes, noise, without));
    auto const b = mean_miou(episodes, run_oracle(episodes, noise, with));
    return {b > a, fmt::format("mIoU without refinement {:.2f}, with 3 refinements {:.2f}", a, b)};
}

Outcome p5()
{
    auto rng = Rng(55);
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i)
    {
        auto const w = int(rng.index(32)) + 1;
        auto const h = int(rng.index(32)) + 1;
        auto const a = test::random_mask(rng, w, h, rng.uniform());
        auto const b = test::random_mask(rng, w, h, rng.uniform());
        mismatches += iou(a, b) != test::naive_iou(a, b);
    }

    int cases = 0;
    int wrong = 0;
    for (int n = 1; n <= 3; ++n)
        for (unsigned gt = 0; gt < (1u << n); ++gt)
            for (unsigned pred = 0; pred < (1u << n); ++pred)
            {
                auto ep = Episode {};
                auto p = Prediction {};
                for (int c = 1; c <= n; ++c)
                {
                    auto const g = ((gt >> (c - 1)) & 1u) != 0;
                    auto const q = ((pred >> (c - 1)) & 1u) != 0;
                    auto gm = BinaryMask(3, 3);
                    gm.set(c - 1, 0, g);
                    ep.gt_presence[ClassId {c}] = g;
                    ep.gt_masks[ClassId {c}] = gm;
                    p.presence[ClassId {c}] = q;
                    p.masks[ClassId {c}] = q ? BinaryMask(3, 3, true) : BinaryMask(3, 3);
                }
                auto brute = true;
                for (int c = 1; c <= n; ++c)
                    brute = brute && (((gt >> (c - 1)) & 1u) == ((pred >> (c - 1)) & 1u));
                wrong += score_episode(ep, p).exact_match != brute;
                ++cases;
            }
    return {mismatches == 0 && wrong == 0,
            fmt::format("{} IoU mismatches over 1000 pairs, {} exact-match mismatches over {} presence pairs",
                        mismatches, wrong, cases)};
}

Outcome p6()
{
    auto const& d = p1_data();
    if (d.results.size() != d.episodes.size())
        return {false, "P1 transcripts unavailable"};
    auto const dir = test::temp_dir("acceptance_replay");
    for (auto const& r: d.results)
        write_transcript(dir / transcript_file_name(r.transcript.episode_id), r.transcript);
    auto replay = std::make_shared<ReplayBackend>(read_transcript_dir(dir));
    auto backends = Backends {replay, replay, replay, nullptr};
    auto const again = run_batch(d.episodes, backends, d.config, 1, TemplateSet::defaults(),
                                 test::synth_index().fingerprint());
    int differing = 0;
    std::size_t left = 0;
    for (std::size_t i = 0; i < d.episodes.size(); ++i)
    {
        differing += again[i].prediction != d.results[i].prediction || again[i].prediction.failed;
        left += replay->remaining(d.episodes[i].episode_id);
    }
    auto const live = backends.chat->is_live() || backends.vision->is_live() || backends.segment->is_live();
    return {differing == 0 && left == 0 && !live,
            fmt::format("{} of {} predictions differ, {} recorded responses unused, live backends: {}", differing,
                        d.episodes.size(), left, live ? "yes" : "no")};
}

Outcome p7()
{
    auto failures = std::vector<std::string> {};

    auto const white = Image(10, 10, Rgb {255, 255, 255});
    auto style = OverlayStyle {};
    style.box_color = {255, 0, 0};
    style.box_thickness = 1;
    auto const boxed = draw_bbox(white, BBox {2, 2, 6, 6}, style);
    int red = 0;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x)
        {
            auto const on_border = x >= 2 && x < 6 && y >= 2 && y < 6 && (x == 2 || x == 5 || y == 2 || y == 5);
            auto const px = boxed.at(x, y);
            auto const want = on_border ? Rgb {255, 0, 0} : Rgb {255, 255, 255};
            red += on_border;
            if (px != want)
                failures.push_back(fmt::format("bbox pixel ({},{})", x, y));
        }
    if (red != 12)
        failures.push_back("bbox perimeter count");

    auto const image = test::canvas_fixture_image();
    auto const mask = test::canvas_fixture_mask();
    style.mask_tint = {102, 204, 255};
    style.mask_alpha = 1.0;
    auto const full = draw_mask_overlay(image, mask, style);
    style.mask_alpha = 0.5;
    auto const half = draw_mask_overlay(image, mask, style);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
        {
            auto const src = image.at(x, y);
            auto const blend = [](int s, int t) { return std::uint8_t((s + t + 1) / 2); };
            auto const want_full = mask.at(x, y) ? Rgb {102, 204, 255} : src;
            auto const want_half = mask.at(x, y) ? Rgb {blend(src.r, 102), blend(src.g, 204), blend(src.b, 255)} : src;
            if (full.at(x, y) != want_full || half.at(x, y) != want_half)
                failures.push_back(fmt::format("overlay pixel ({},{})", x, y));
        }

    auto const snapshot = [&] {
        return std::pair {content_hash(draw_coordinate_grid(image, test::golden_grid())),
                          content_hash(compose_support_panel(image, mask, tight_bbox(mask), OverlayStyle {},
                                                             test::golden_grid()))};
    };
    auto const first = snapshot();
    auto const second = snapshot();
    if (first.first != test::kGridGolden || first.second != test::kSupportGolden)
        failures.push_back("golden hash differs from the frozen snapshot");
    if (first != second)
        failures.push_back("golden hashes differ between runs");
    auto threaded = std::vector<std::pair<std::string, std::string>>(8);
    auto threads = std::vector<std::thread> {};
    for (std::size_t i = 0; i < threaded.size(); ++i)
        threads.emplace_back([&, i] { threaded[i] = snapshot(); });
    for (auto& t: threads)
        t.join();
    for (auto const& h: threaded)
        if (h != first)
            failures.push_back("golden hashes differ across threads");

    if (failures.size() > 3)
        failures.resize(3);
    return {failures.empty(), failures.empty() ? "bbox and overlay fixtures exact; goldens stable over 10 renders"
                                               : fmt::format("{}", fmt::join(failures, "; "))};
}

Outcome p8()
{
    auto const corpus = test::load_parser_corpus();
    auto failed = std::vector<std::string> {};
    for (auto const& entry: corpus)
        if (auto const problem = test::check_parser_case(entry); !problem.empty())
            failed.push_back(entry.at("name").get<std::string>() + ": " + problem);
    auto const pass = corpus.size() >= 30 && failed.empty();
    return {pass, failed.empty() ? fmt::format("{} corpus responses with expected outcomes", corpus.size())
                                 : fmt::format("{}", fmt::join(failed, "; "))};
}

Outcome p9()
{
    auto const table = render_report(test::paper_row_report(), ReportFormat::text_table);
    auto const exact = table == test::kPaperRowTable;
    auto structure = true;
    for (auto const* needle: {"classification 0/1 exact ratio (%)", "segmentation mIoU (%)", "5^0", "5^1", "5^2",
                              "5^3", "avg.", "86.4", "38.2"})
        structure = structure && table.find(needle) != std::string::npos;
    return {exact && structure, exact ? "table matches the frozen layout with 86.4 and 38.2"
                                      : "table differs:\n" + table};
}

Outcome p10()
{
    auto const& d = p1_data();
    auto const serial = run_oracle(d.episodes, NoiseModel {}, d.config, 1);
    auto const parallel = run_oracle(d.episodes, NoiseModel {}, d.config, 8);
    int differing = 0;
    for (std::size_t i = 0; i < d.episodes.size(); ++i)
        differing += serial[i].prediction != parallel[i].prediction
                     || without_latency(serial[i].transcript) != without_latency(parallel[i].transcript);
    return {differing == 0 && serial.size() == d.episodes.size(),
            fmt::format("{} of {} episodes differ between parallelism 1 and 8", differing, d.episodes.size())};
}

} // namespace

int main()
{
    auto const criteria = std::vector<std::pair<const char*, std::function<Outcome()>>> {
        {"P1", p1}, {"P2", p2}, {"P3", p3}, {"P4", p4}, {"P5", p5},
        {"P6", p6}, {"P7", p7}, {"P8", p8}, {"P9", p9}, {"P10", p10},
    };
    int failed = 0;
    for (auto const& [name, check]: criteria)
    {
        Outcome v;
        try
        {
            v = check();
        }
        catch (const std::exception& e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        fmt::print("{} {} {}\n", name, v.pass ? "PASS" : "FAIL", v.detail);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

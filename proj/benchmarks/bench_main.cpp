// SPDX-License-Identifier: Apache-2.0
#include "fscs/agent.hpp"
#include "fscs/canvas.hpp"
#include "fscs/dataset.hpp"
#include "fscs/episode.hpp"
#include "fscs/mask_codec.hpp"
#include "fscs/metrics.hpp"
#include "fscs/oracle.hpp"
#include "fscs/rng.hpp"
#include "fscs/synth.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

namespace
{

using namespace fscs;

BinaryMask noisy_mask(std::uint64_t seed, int w, int h)
{
    auto rng = Rng(seed);
    auto m = BinaryMask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.set(x, y, rng.uniform() < 0.5);
    return m;
}

BinaryMask disc(int w, int h)
{
    auto m = BinaryMask(w, h);
    auto const r = std::min(w, h) / 3;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.set(x, y, (x - w / 2) * (x - w / 2) + (y - h / 2) * (y - h / 2) <= r * r);
    return m;
}

void BM_Iou(benchmark::State& state)
{
    auto const side = int(state.range(0));
    auto const a = noisy_mask(1, side, side);
    auto const b = noisy_mask(2, side, side);
    for (auto _: state)
        benchmark::DoNotOptimize(iou(a, b));
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Iou)->Arg(64)->Arg(512);

void BM_RleRoundTrip(benchmark::State& state)
{
    auto const side = int(state.range(0));
    auto const m = disc(side, side);
    for (auto _: state)
        benchmark::DoNotOptimize(decode_mask(encode_mask(m, MaskFormat::rle), MaskFormat::rle));
}
BENCHMARK(BM_RleRoundTrip)->Arg(64)->Arg(512);

void BM_MaskOverlay(benchmark::State& state)
{
    auto const side = int(state.range(0));
    auto const image = Image(side, side, Rgb {40, 80, 120});
    auto const m = disc(side, side);
    for (auto _: state)
        benchmark::DoNotOptimize(draw_mask_overlay(image, m, OverlayStyle {}));
}
BENCHMARK(BM_MaskOverlay)->Arg(128)->Arg(512);

const DatasetIndex& bench_index()
{
    static auto const index = [] {
        auto const root = std::filesystem::temp_directory_path() / "fscs_bench_synth";
        std::filesystem::remove_all(root);
        write_synthetic_dataset(root);
        return load_dataset(root);
    }();
    return index;
}

void BM_OracleEpisode(benchmark::State& state)
{
    auto const episodes = sample_episodes(bench_index(), {int(state.range(0)), 1, 0, 7, 1});
    auto oracle = std::make_shared<OracleBackend>(NoiseModel {0.2, 0.1, 1, 0, 7});
    auto backends = Backends {oracle, oracle, oracle, nullptr};
    auto const config = AgentConfig {};
    for (auto _: state)
        benchmark::DoNotOptimize(run_episode(episodes.front(), backends, config));
}
BENCHMARK(BM_OracleEpisode)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

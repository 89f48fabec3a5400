// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "fscs/error.hpp"
#include "fscs/image_io.hpp"
#include "fscs/transcript.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <ostream>

namespace fscs::cli
{

using nlohmann::json;

int exit_code_for(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidEpisodeSpec:
        case ErrorCode::InvalidTemplate:
        case ErrorCode::UnboundPlaceholder: return exit_config;
        case ErrorCode::MissingManifest:
        case ErrorCode::InvalidManifest:
        case ErrorCode::MaskImageMismatch:
        case ErrorCode::UnknownClassInMask:
        case ErrorCode::InsufficientImages:
        case ErrorCode::UnknownEpisode:
        case ErrorCode::ImageIo:
        case ErrorCode::MalformedEncoding:
        case ErrorCode::EmptyInput: return exit_dataset;
        default: return exit_internal;
    }
}

namespace
{

DatasetIndex open_dataset(const RunConfig& config)
{
    if (config.dataset_root.empty())
        throw Error(ErrorCode::ConfigError, "dataset.root is not set");
    return load_dataset(config.dataset_root, config.layout);
}

std::vector<Episode> load_episodes(const RunConfig& config, const DatasetIndex& index)
{
    if (config.episode_list.empty())
        return sample_episodes(index, config.episodes);
    auto episodes = std::vector<Episode> {};
    for (auto const& d: read_episode_list(config.episode_list))
        episodes.push_back(materialize(index, d));
    return episodes;
}

TemplateSet load_templates(const RunConfig& config)
{
    return config.templates_dir.empty() ? TemplateSet::defaults() : TemplateSet::load(config.templates_dir);
}

Backends make_backends(const RunConfig& config)
{
    auto backends = Backends {};
    std::shared_ptr<ToolBackend> oracle;
    std::shared_ptr<ToolBackend> replay;
    auto pick = [&](const BackendConfig& b) -> std::shared_ptr<ToolBackend> {
        switch (b.mode)
        {
            case BackendMode::oracle:
                if (!oracle)
                    oracle = std::make_shared<OracleBackend>(config.noise);
                return oracle;
            case BackendMode::replay:
                if (!replay)
                    replay = std::make_shared<ReplayBackend>(read_transcript_dir(config.replay_dir));
                return replay;
            case BackendMode::live: return std::make_shared<HttpBackend>(b.endpoint);
        }
        return nullptr;
    };
    backends.chat = pick(config.chat);
    backends.vision = pick(config.vision);
    backends.segment = pick(config.segment);
    return backends;
}

} // namespace

int cmd_sample(const RunConfig& config, std::ostream& out)
{
    auto const index = open_dataset(config);
    auto const episodes = sample_episodes(index, config.episodes);
    auto descriptors = std::vector<EpisodeDescriptor> {};
    for (auto const& e: episodes)
        descriptors.push_back(describe(e));

    std::filesystem::create_directories(config.output);
    auto const path = config.output / "episodes.jsonl";
    write_episode_list(path, descriptors);

    fmt::print(out, "sampled {} episode(s), {}-way {}-shot, fold {} -> {}\n", episodes.size(), config.episodes.n_way,
               config.episodes.k_shot, config.episodes.fold, path.string());
    for (int fold = 0; fold < index.num_folds(); ++fold)
    {
        auto names = std::vector<std::string> {};
        for (auto const id: index.classes_in_fold(fold))
            names.push_back(fmt::format("{} ({})", id.value, index.class_name(id)));
        fmt::print(out, "fold {}{}: {}\n", fold, fold == config.episodes.fold ? " *" : "", fmt::join(names, ", "));
    }
    return exit_ok;
}

int cmd_run(const RunConfig& config, std::ostream& out)
{
    auto const index = open_dataset(config);
    auto const episodes = load_episodes(config, index);
    auto const templates = load_templates(config);
    auto backends = make_backends(config);

    auto const start = std::chrono::steady_clock::now();
    auto const results = run_batch(episodes, backends, config.agent, config.parallelism, templates,
                                   index.fingerprint());
    auto const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    auto const dir = config.output / "transcripts";
    std::filesystem::create_directories(dir);
    int failures = 0;
    for (auto const& r: results)
    {
        write_transcript(dir / transcript_file_name(r.transcript.episode_id), r.transcript);
        if (r.prediction.failed)
        {
            ++failures;
            fmt::print(out, "episode {} failed: {}\n", r.transcript.episode_id,
                       r.prediction.failure_reason.value_or("unknown"));
        }
    }

    auto manifest = json {{"config", json::object()},
                          {"dataset_fingerprint", index.fingerprint()},
                          {"episode_count", results.size()},
                          {"failure_count", failures},
                          {"wall_clock_s", seconds},
                          {"transcripts_dir", "transcripts"}};
    manifest["config"]["agent"] = to_json(config.agent);
    manifest["config"]["parallelism"] = config.parallelism;
    manifest["config"]["noise"] = {{"box_scale_sigma", config.noise.box_scale_sigma},
                                   {"box_jitter_sigma", config.noise.box_jitter_sigma},
                                   {"mask_boundary_radius", config.noise.mask_boundary_radius},
                                   {"flip_presence_prob", config.noise.flip_presence_prob},
                                   {"seed", config.noise.seed}};
    write_file(config.output / "run_manifest.json", manifest.dump(2) + "\n");

    fmt::print(out, "ran {} episode(s) in {:.2f} s, {} failed; transcripts in {}\n", results.size(), seconds, failures,
               dir.string());
    return !results.empty() && failures == int(results.size()) ? exit_all_failed : exit_ok;
}

int cmd_render(const RunConfig& config, const std::string& episode_id, std::ostream& out)
{
    auto const index = open_dataset(config);
    auto const episodes = load_episodes(config, index);
    auto it = std::find_if(episodes.begin(), episodes.end(),
                           [&](const Episode& e) { return e.episode_id == episode_id; });
    if (it == episodes.end())
        throw Error(ErrorCode::UnknownEpisode, fmt::format("no episode with id '{}'", episode_id));

    auto const dir = config.output / "render" / episode_id;
    std::filesystem::create_directories(dir);
    int written = 0;
    for (auto const& group: it->support)
        for (std::size_t k = 0; k < group.examples.size(); ++k)
        {
            auto const path = dir / fmt::format("support_c{}_k{}.png", group.class_id.value, k + 1);
            save_png(path, support_panel(group.examples[k], config.agent));
            ++written;
        }
    save_png(dir / "query_grid.png", query_panel(load_image(it->query_image_ref), config.agent));
    ++written;
    fmt::print(out, "wrote {} image(s) to {}\n", written, dir.string());
    return exit_ok;
}

int cmd_eval(const RunConfig& config, const std::filesystem::path& transcripts_dir, std::ostream& out)
{
    auto const dir = transcripts_dir.empty() ? config.output / "transcripts" : transcripts_dir;
    if (!std::filesystem::is_directory(dir))
        throw Error(ErrorCode::EmptyInput, fmt::format("{} is not a directory", dir.string()));
    auto const transcripts = read_transcript_dir(dir);
    if (transcripts.empty())
        throw Error(ErrorCode::EmptyInput, fmt::format("no transcripts in {}", dir.string()));

    auto const index = open_dataset(config);
    auto scores = std::vector<EpisodeScore> {};
    auto folds = std::vector<int> {};
    for (auto const& t: transcripts)
    {
        if (!t.episode)
            throw Error(ErrorCode::MalformedEncoding,
                        fmt::format("transcript {} has no episode descriptor", t.episode_id));
        if (!t.dataset_fingerprint.empty() && t.dataset_fingerprint != index.fingerprint())
            fmt::print(out, "warning: transcript {} was recorded against a different dataset\n", t.episode_id);
        auto const episode = materialize(index, *t.episode);
        scores.push_back(score_episode(episode, t.prediction));
        folds.push_back(t.episode->spec.fold);
    }

    auto report = aggregate(scores, folds, config.miou_mode);
    report.method = config.method;
    auto const& spec = transcripts.front().episode->spec;
    report.setting = fmt::format("{}-way {}-shot", spec.n_way, spec.k_shot);

    std::filesystem::create_directories(config.output);
    auto const table = render_report(report, ReportFormat::text_table);
    write_file(config.output / "report.txt", table);
    write_file(config.output / "report.json", render_report(report, ReportFormat::json));
    write_file(config.output / "report.csv", render_report(report, ReportFormat::csv));
    out << table;
    return exit_ok;
}

} // namespace fscs::cli

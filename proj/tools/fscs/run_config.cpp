// SPDX-License-Identifier: Apache-2.0
#include "run_config.hpp"

#include "fscs/error.hpp"
#include "fscs/image_io.hpp"

#include <fmt/format.h>

namespace fscs::cli
{

using nlohmann::json;

namespace
{

json backend_json()
{
    return {{"mode", "oracle"}, {"base_url", ""}, {"api_key_env", ""}, {"model", ""}, {"requests_per_minute", 0}};
}

/// Recursive merge where objects merge key by key and anything else replaces.
void merge_into(json& base, const json& patch)
{
    if (!base.is_object() || !patch.is_object())
    {
        base = patch;
        return;
    }
    for (auto const& [k, v]: patch.items())
    {
        if (base.contains(k))
            merge_into(base[k], v);
        else
            base[k] = v;
    }
}

BackendConfig backend_from(const json& j, std::string_view name)
{
    auto b = BackendConfig {};
    auto const mode = j.at("mode").get<std::string>();
    if (mode == "oracle")
        b.mode = BackendMode::oracle;
    else if (mode == "live")
        b.mode = BackendMode::live;
    else if (mode == "replay")
        b.mode = BackendMode::replay;
    else
        throw Error(ErrorCode::ConfigError, fmt::format("backends.{}.mode must be oracle, live or replay", name));
    b.endpoint.base_url = j.at("base_url").get<std::string>();
    b.endpoint.api_key_env = j.at("api_key_env").get<std::string>();
    b.endpoint.model = j.at("model").get<std::string>();
    b.endpoint.requests_per_minute = j.at("requests_per_minute").get<double>();
    if (b.mode == BackendMode::live && b.endpoint.base_url.empty())
        throw Error(ErrorCode::ConfigError, fmt::format("backends.{} is live but has no base_url", name));
    return b;
}

/// Rejects keys the defaults do not know about. The agent section validates itself.
void check_known(const json& j, const json& known, const std::string& where)
{
    for (auto const& [k, v]: j.items())
    {
        auto const path = where.empty() ? k : where + "." + k;
        if (!known.contains(k))
            throw Error(ErrorCode::ConfigError, fmt::format("unknown config key '{}'", path));
        if (path != "agent" && v.is_object() && known.at(k).is_object())
            check_known(v, known.at(k), path);
    }
}

} // namespace

json default_config_json()
{
    auto const layout = LayoutConfig {};
    auto const spec = EpisodeSpec {};
    return {{"dataset",
             {{"root", ""},
              {"images_dir", layout.images_dir},
              {"masks_dir", layout.masks_dir},
              {"manifest", layout.manifest},
              {"num_folds", layout.num_folds}}},
            {"templates_dir", ""},
            {"episodes",
             {{"n_way", spec.n_way}, {"k_shot", spec.k_shot}, {"fold", spec.fold}, {"seed", spec.seed},
              {"count", spec.count}}},
            {"episode_list", ""},
            {"backends", {{"chat", backend_json()}, {"vision", backend_json()}, {"segment", backend_json()}}},
            {"replay_dir", ""},
            {"noise",
             {{"box_scale_sigma", 0.0},
              {"box_jitter_sigma", 0.0},
              {"mask_boundary_radius", 0},
              {"flip_presence_prob", 0.0},
              {"seed", 0}}},
            {"agent", to_json(AgentConfig {})},
            {"parallelism", 1},
            {"miou_mode", "flat"},
            {"method", "Ours"},
            {"output", "fscs-out"}};
}

void apply_override(json& config, const std::string& assignment)
{
    auto const eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw Error(ErrorCode::ConfigError, fmt::format("override '{}' is not key.path=value", assignment));
    auto const path = assignment.substr(0, eq);
    auto const text = assignment.substr(eq + 1);
    auto value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;

    auto* node = &config;
    std::size_t start = 0;
    while (true)
    {
        auto const dot = path.find('.', start);
        auto const key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty())
            throw Error(ErrorCode::ConfigError, fmt::format("override '{}' has an empty key segment", assignment));
        if (!node->is_object())
            throw Error(ErrorCode::ConfigError, fmt::format("override '{}' descends into a non-object", assignment));
        if (dot == std::string::npos)
        {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null())
            *node = json::object();
        start = dot + 1;
    }
}

json merge_config(const std::filesystem::path& file, const std::vector<std::string>& overrides)
{
    auto config = default_config_json();
    if (!file.empty())
    {
        std::string text;
        try
        {
            text = read_file(file);
        }
        catch (const Error& e)
        {
            throw Error(ErrorCode::ConfigError, e.what());
        }
        auto const patch = json::parse(text, nullptr, false);
        if (patch.is_discarded() || !patch.is_object())
            throw Error(ErrorCode::ConfigError, fmt::format("{} is not a JSON object", file.string()));
        merge_into(config, patch);
    }
    for (auto const& o: overrides)
        apply_override(config, o);
    return config;
}

RunConfig run_config_from_json(const json& j)
{
    check_known(j, default_config_json(), "");

    try
    {
        auto c = RunConfig {};
        auto const& d = j.at("dataset");
        c.dataset_root = d.at("root").get<std::string>();
        c.layout.images_dir = d.at("images_dir").get<std::string>();
        c.layout.masks_dir = d.at("masks_dir").get<std::string>();
        c.layout.manifest = d.at("manifest").get<std::string>();
        c.layout.num_folds = d.at("num_folds").get<int>();
        c.templates_dir = j.at("templates_dir").get<std::string>();

        auto const& e = j.at("episodes");
        c.episodes.n_way = e.at("n_way").get<int>();
        c.episodes.k_shot = e.at("k_shot").get<int>();
        c.episodes.fold = e.at("fold").get<int>();
        c.episodes.seed = e.at("seed").get<std::uint64_t>();
        c.episodes.count = e.at("count").get<int>();
        c.episode_list = j.at("episode_list").get<std::string>();

        auto const& b = j.at("backends");
        c.chat = backend_from(b.at("chat"), "chat");
        c.vision = backend_from(b.at("vision"), "vision");
        c.segment = backend_from(b.at("segment"), "segment");
        c.replay_dir = j.at("replay_dir").get<std::string>();
        auto const replays = int(c.chat.mode == BackendMode::replay) + int(c.vision.mode == BackendMode::replay)
                             + int(c.segment.mode == BackendMode::replay);
        if (replays != 0 && replays != 3)
            throw Error(ErrorCode::ConfigError, "replay mode must be selected for all three tool kinds together");
        if (replays == 3 && c.replay_dir.empty())
            throw Error(ErrorCode::ConfigError, "replay mode needs replay_dir");

        auto const& n = j.at("noise");
        c.noise.box_scale_sigma = n.at("box_scale_sigma").get<double>();
        c.noise.box_jitter_sigma = n.at("box_jitter_sigma").get<double>();
        c.noise.mask_boundary_radius = n.at("mask_boundary_radius").get<int>();
        c.noise.flip_presence_prob = n.at("flip_presence_prob").get<double>();
        c.noise.seed = n.at("seed").get<std::uint64_t>();
        validate(c.noise);

        c.agent = agent_config_from_json(j.at("agent"));
        c.parallelism = j.at("parallelism").get<int>();
        if (c.parallelism < 1)
            throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");
        auto const mode = j.at("miou_mode").get<std::string>();
        if (mode != "flat" && mode != "per_class_macro")
            throw Error(ErrorCode::ConfigError, "miou_mode is 'flat' or 'per_class_macro'");
        c.miou_mode = mode == "flat" ? MiouMode::flat : MiouMode::per_class_macro;
        c.method = j.at("method").get<std::string>();
        c.output = j.at("output").get<std::string>();
        return c;
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

} // namespace fscs::cli

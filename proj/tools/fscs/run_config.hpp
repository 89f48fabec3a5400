// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/agent.hpp"
#include "fscs/dataset.hpp"
#include "fscs/episode.hpp"
#include "fscs/metrics.hpp"
#include "fscs/oracle.hpp"
#include "fscs/toolkit.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fscs::cli
{

enum class BackendMode
{
    oracle,
    live,
    replay,
};

struct BackendConfig
{
    BackendMode mode = BackendMode::oracle;
    HttpEndpoint endpoint;
};

/// Everything a command needs, resolved from defaults, the config file and overrides.
struct RunConfig
{
    std::filesystem::path dataset_root;
    LayoutConfig layout;
    std::filesystem::path templates_dir;
    EpisodeSpec episodes;
    std::filesystem::path episode_list;
    BackendConfig chat;
    BackendConfig vision;
    BackendConfig segment;
    std::filesystem::path replay_dir;
    NoiseModel noise;
    AgentConfig agent;
    int parallelism = 1;
    MiouMode miou_mode = MiouMode::flat;
    std::string method = "Ours";
    std::filesystem::path output = "fscs-out";
};

/// Built-in defaults as a JSON document.
nlohmann::json default_config_json();

/// Applies `key.path=value`. The value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// defaults < file < overrides. Throws Error(ConfigError).
nlohmann::json merge_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

RunConfig run_config_from_json(const nlohmann::json& j);

} // namespace fscs::cli

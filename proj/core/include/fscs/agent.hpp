// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/canvas.hpp"
#include "fscs/episode.hpp"
#include "fscs/prediction.hpp"
#include "fscs/prompts.hpp"
#include "fscs/toolkit.hpp"
#include "fscs/transcript.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace fscs
{

enum class PlannerMode
{
    llm,
    fixed,
};

struct AgentConfig
{
    int max_refinements_per_class = 3;
    double judge_threshold = 0.75; ///< oracle judge only
    double feedback_gain = 0.5;    ///< oracle quester only
    PlannerMode planner_mode = PlannerMode::llm;
    Budget chat_budget {60000, 2};
    Budget vision_budget {120000, 2};
    Budget segment_budget {60000, 2};
    RetryPolicy retry;
    int parse_retries = 1;
    OverlayStyle style;
    GridSpec grid;
    bool grid_on_support = false;
};

void validate(const AgentConfig& config);
nlohmann::json to_json(const AgentConfig& config);
AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig base = {});

/// Shared, thread-safe handles for the three tool kinds.
struct Backends
{
    std::shared_ptr<ToolBackend> chat;
    std::shared_ptr<ToolBackend> vision;
    std::shared_ptr<ToolBackend> segment;
    Clock* clock = nullptr; ///< defaults to the system clock
};

enum class AgentStage
{
    planning,
    cognizing,
    questing,
    segmenting,
    judging,
    refining,
    done,
    failed,
};

std::string_view to_string(AgentStage stage);
/// Legal state-machine transitions.
bool is_legal_transition(AgentStage from, AgentStage to);

/// Support panel exactly as sent to the cognize stage.
Image support_panel(const SupportExample& example, const AgentConfig& config);
/// Query image with the coordinate grid, exactly as sent to the quest stage.
Image query_panel(const Image& query, const AgentConfig& config);

/// Produces the plan: canonical in fixed mode, otherwise asked of the chat backend with
/// fallback to canonical on an invalid answer. Appends to `transcript`.
std::vector<PlannedStep> plan(const Episode& episode, Backends& backends, const AgentConfig& config,
                              const TemplateSet& templates, Transcript& transcript);

struct EpisodeResult
{
    Prediction prediction;
    Transcript transcript;
};

/// Runs the full cognize / quest / segment / judge / refine pipeline for one episode.
/// Never throws for tool failures; those mark the prediction failed.
EpisodeResult run_episode(const Episode& episode, Backends& backends, const AgentConfig& config,
                          const TemplateSet& templates = TemplateSet::defaults(), std::string dataset_fingerprint = {});

/// Results in input order. One failing episode never affects the others.
std::vector<EpisodeResult> run_batch(std::span<const Episode> episodes, Backends& backends, const AgentConfig& config,
                                     int parallelism, const TemplateSet& templates = TemplateSet::defaults(),
                                     std::string dataset_fingerprint = {});

} // namespace fscs

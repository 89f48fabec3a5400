// SPDX-License-Identifier: Apache-2.0
#include "fscs/agent.hpp"

#include "fscs/error.hpp"
#include "fscs/image_io.hpp"
#include "fscs/mask_codec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <thread>

namespace fscs
{

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace
{

json rgb_json(Rgb c)
{
    return json::array({c.r, c.g, c.b});
}

Rgb rgb_from(const json& j)
{
    if (!j.is_array() || j.size() != 3)
        throw Error(ErrorCode::ConfigError, "colors are [r, g, b] arrays");
    auto channel = [](const json& v) {
        auto const i = v.get<int>();
        if (i < 0 || i > 255)
            throw Error(ErrorCode::ConfigError, "color channel out of range");
        return static_cast<std::uint8_t>(i);
    };
    return {channel(j[0]), channel(j[1]), channel(j[2])};
}

json budget_json(const Budget& b)
{
    return {{"timeout_ms", b.timeout_ms}, {"max_retries", b.max_retries}};
}

/// Calls `apply(key, value)` for every member, rejecting unknown keys.
template <class Apply>
void for_members(const json& j, std::string_view where, std::initializer_list<std::string_view> known, Apply apply)
{
    if (!j.is_object())
        throw Error(ErrorCode::ConfigError, fmt::format("{} must be an object", where));
    for (auto const& [key, value]: j.items())
    {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error(ErrorCode::ConfigError, fmt::format("unknown key '{}' in {}", key, where));
        apply(key, value);
    }
}

Budget budget_from(const json& j, Budget b, std::string_view where)
{
    for_members(j, where, {"timeout_ms", "max_retries"}, [&](const std::string& k, const json& v) {
        if (k == "timeout_ms")
            b.timeout_ms = v.get<int>();
        else
            b.max_retries = v.get<int>();
    });
    return b;
}

} // namespace

void validate(const AgentConfig& c)
{
    auto fail = [](std::string message) { throw Error(ErrorCode::ConfigError, message); };
    if (c.max_refinements_per_class < 0)
        fail("max_refinements_per_class must be >= 0");
    if (!(c.judge_threshold > 0 && c.judge_threshold <= 1))
        fail("judge_threshold must lie in (0, 1]");
    if (!(c.feedback_gain > 0 && c.feedback_gain <= 1))
        fail("feedback_gain must lie in (0, 1]");
    if (c.parse_retries < 0)
        fail("parse_retries must be >= 0");
    for (auto const* b: {&c.chat_budget, &c.vision_budget, &c.segment_budget})
        if (b->timeout_ms <= 0 || b->max_retries < 0)
            fail("budgets need timeout_ms > 0 and max_retries >= 0");
    if (c.retry.base_delay.count() < 0 || c.retry.max_delay < c.retry.base_delay)
        fail("retry delays must satisfy 0 <= base_delay_ms <= max_delay_ms");
    if (!(c.retry.jitter >= 0 && c.retry.jitter < 1))
        fail("retry jitter must lie in [0, 1)");
    validate(c.style);
    validate(c.grid);
}

json to_json(const AgentConfig& c)
{
    return {{"max_refinements_per_class", c.max_refinements_per_class},
            {"judge_threshold", c.judge_threshold},
            {"feedback_gain", c.feedback_gain},
            {"planner_mode", c.planner_mode == PlannerMode::llm ? "llm" : "fixed"},
            {"budgets",
             {{"chat", budget_json(c.chat_budget)},
              {"vision", budget_json(c.vision_budget)},
              {"segment", budget_json(c.segment_budget)}}},
            {"retry",
             {{"base_delay_ms", c.retry.base_delay.count()},
              {"max_delay_ms", c.retry.max_delay.count()},
              {"jitter", c.retry.jitter},
              {"jitter_seed", c.retry.jitter_seed},
              {"max_payload_bytes", c.retry.max_payload_bytes}}},
            {"parse_retries", c.parse_retries},
            {"style",
             {{"box_color", rgb_json(c.style.box_color)},
              {"box_thickness", c.style.box_thickness},
              {"mask_tint", rgb_json(c.style.mask_tint)},
              {"mask_alpha", c.style.mask_alpha}}},
            {"grid",
             {{"tick_interval", c.grid.tick_interval},
              {"draw_full_grid", c.grid.draw_full_grid},
              {"label_ticks", c.grid.label_ticks},
              {"line_color", rgb_json(c.grid.line_color)},
              {"label_size", c.grid.label_size},
              {"tick_length", c.grid.tick_length}}},
            {"grid_on_support", c.grid_on_support}};
}

AgentConfig agent_config_from_json(const json& j, AgentConfig c)
{
    try
    {
        for_members(
            j, "agent config",
            {"max_refinements_per_class", "judge_threshold", "feedback_gain", "planner_mode", "budgets", "retry",
             "parse_retries", "style", "grid", "grid_on_support"},
            [&](const std::string& k, const json& v) {
                if (k == "max_refinements_per_class")
                    c.max_refinements_per_class = v.get<int>();
                else if (k == "judge_threshold")
                    c.judge_threshold = v.get<double>();
                else if (k == "feedback_gain")
                    c.feedback_gain = v.get<double>();
                else if (k == "planner_mode")
                {
                    auto const mode = v.get<std::string>();
                    if (mode != "llm" && mode != "fixed")
                        throw Error(ErrorCode::ConfigError, "planner_mode is 'llm' or 'fixed'");
                    c.planner_mode = mode == "llm" ? PlannerMode::llm : PlannerMode::fixed;
                }
                else if (k == "budgets")
                    for_members(v, "budgets", {"chat", "vision", "segment"}, [&](const std::string& t, const json& b) {
                        auto& target = t == "chat" ? c.chat_budget : t == "vision" ? c.vision_budget : c.segment_budget;
                        target = budget_from(b, target, t);
                    });
                else if (k == "retry")
                    for_members(v, "retry",
                                {"base_delay_ms", "max_delay_ms", "jitter", "jitter_seed", "max_payload_bytes"},
                                [&](const std::string& r, const json& x) {
                                    if (r == "base_delay_ms")
                                        c.retry.base_delay = std::chrono::milliseconds(x.get<long long>());
                                    else if (r == "max_delay_ms")
                                        c.retry.max_delay = std::chrono::milliseconds(x.get<long long>());
                                    else if (r == "jitter")
                                        c.retry.jitter = x.get<double>();
                                    else if (r == "jitter_seed")
                                        c.retry.jitter_seed = x.get<std::uint64_t>();
                                    else
                                        c.retry.max_payload_bytes = x.get<std::size_t>();
                                });
                else if (k == "parse_retries")
                    c.parse_retries = v.get<int>();
                else if (k == "style")
                    for_members(v, "style", {"box_color", "box_thickness", "mask_tint", "mask_alpha"},
                                [&](const std::string& s, const json& x) {
                                    if (s == "box_color")
                                        c.style.box_color = rgb_from(x);
                                    else if (s == "box_thickness")
                                        c.style.box_thickness = x.get<int>();
                                    else if (s == "mask_tint")
                                        c.style.mask_tint = rgb_from(x);
                                    else
                                        c.style.mask_alpha = x.get<double>();
                                });
                else if (k == "grid")
                    for_members(v, "grid",
                                {"tick_interval", "draw_full_grid", "label_ticks", "line_color", "label_size",
                                 "tick_length"},
                                [&](const std::string& g, const json& x) {
                                    if (g == "tick_interval")
                                        c.grid.tick_interval = x.get<int>();
                                    else if (g == "draw_full_grid")
                                        c.grid.draw_full_grid = x.get<bool>();
                                    else if (g == "label_ticks")
                                        c.grid.label_ticks = x.get<bool>();
                                    else if (g == "line_color")
                                        c.grid.line_color = rgb_from(x);
                                    else if (g == "label_size")
                                        c.grid.label_size = x.get<int>();
                                    else
                                        c.grid.tick_length = x.get<int>();
                                });
                else
                    c.grid_on_support = v.get<bool>();
            });
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::ConfigError, std::string("agent config: ") + e.what());
    }
    validate(c);
    return c;
}

// ---------------------------------------------------------------------------
// State machine

std::string_view to_string(AgentStage stage)
{
    switch (stage)
    {
        case AgentStage::planning: return "planning";
        case AgentStage::cognizing: return "cognizing";
        case AgentStage::questing: return "questing";
        case AgentStage::segmenting: return "segmenting";
        case AgentStage::judging: return "judging";
        case AgentStage::refining: return "refining";
        case AgentStage::done: return "done";
        case AgentStage::failed: return "failed";
    }
    return "unknown";
}

bool is_legal_transition(AgentStage from, AgentStage to)
{
    using S = AgentStage;
    if (from == S::done || from == S::failed)
        return false;
    if (to == S::failed)
        return true;
    // Moving on to the next class, or finishing, is allowed after any per-class stage.
    auto const next_class = to == S::cognizing || to == S::questing || to == S::done;
    switch (from)
    {
        case S::planning: return next_class;
        case S::cognizing: return to == S::questing;
        case S::questing: return to == S::segmenting || next_class;
        case S::segmenting: return to == S::judging || next_class;
        case S::judging: return to == S::refining || next_class;
        case S::refining: return to == S::questing;
        default: return false;
    }
}

// ---------------------------------------------------------------------------
// Episode runner

namespace
{

/// A tool failure that ends the episode.
struct EpisodeFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::string color_name(Rgb c)
{
    if (c == Rgb {255, 0, 0})
        return "RED";
    if (c == Rgb {102, 204, 255})
        return "LIGHT BLUE";
    if (c == Rgb {0, 255, 0})
        return "GREEN";
    if (c == Rgb {255, 255, 0})
        return "YELLOW";
    return fmt::format("rgb({}, {}, {})", c.r, c.g, c.b);
}

std::string box_text(const BBox& b)
{
    return fmt::format("[{}, {}, {}, {}]", b.x_min, b.y_min, b.x_max, b.y_max);
}

struct ClassState
{
    std::optional<CognitiveProfile> profile;
    bool present = false;
    std::optional<BBox> box;
    std::optional<BinaryMask> mask;
    bool finished = false;
};

class Runner
{
public:
    Runner(const Episode& episode, Backends& backends, const AgentConfig& config, const TemplateSet& templates,
           Transcript& transcript):
        episode_(episode),
        backends_(backends),
        config_(config),
        templates_(templates),
        transcript_(transcript),
        clock_(backends.clock != nullptr ? *backends.clock : SystemClock::instance())
    {
    }

    std::vector<PlannedStep> make_plan();
    Prediction run();

private:
    void go(AgentStage to)
    {
        if (!is_legal_transition(stage_, to))
            throw std::logic_error(fmt::format("illegal transition {} -> {}", to_string(stage_), to_string(to)));
        stage_ = to;
    }

    ToolBackend& backend(ToolKind kind) const
    {
        auto const& b = kind == ToolKind::chat ? backends_.chat
                        : kind == ToolKind::vision ? backends_.vision
                                                   : backends_.segment;
        if (!b)
            throw EpisodeFailure(fmt::format("no {} backend configured", to_string(kind)));
        return *b;
    }

    const Budget& budget(ToolKind kind) const
    {
        return kind == ToolKind::chat ? config_.chat_budget
               : kind == ToolKind::vision ? config_.vision_budget
                                          : config_.segment_budget;
    }

    RequestContext context(Stage stage, std::optional<ClassId> id, int iteration) const
    {
        auto ctx = RequestContext {};
        ctx.episode = &episode_;
        ctx.stage = stage;
        ctx.class_id = id;
        ctx.iteration = iteration;
        ctx.feedback_gain = config_.feedback_gain;
        ctx.judge_threshold = config_.judge_threshold;
        return ctx;
    }

    /// One tool call, recorded. Fatal outcomes end the episode.
    std::pair<ToolResponse, std::size_t> exchange(const ToolRequest& request)
    {
        auto r = call(backend(request.tool), request, config_.retry, clock_);
        auto step = StepRecord {};
        step.ordinal = int(transcript_.steps.size());
        step.stage = request.context.stage;
        step.tool = request.tool;
        step.class_id = request.context.class_id;
        step.iteration = request.context.iteration;
        step.request_hash = request.hash();
        step.prompt_text = request.prompt_text();
        step.image_refs = request.image_hashes();
        step.raw_response = r.raw_body(request.tool);
        step.status = r.status;
        step.attempt_count = r.attempt_count;
        step.latency_ms = r.latency_ms;
        step.outcome = r.status == ToolStatus::ok ? "ok" : r.error;
        transcript_.steps.push_back(std::move(step));
        auto const index = transcript_.steps.size() - 1;
        if (r.status != ToolStatus::ok)
        {
            auto const who = request.context.class_id ? " class " + to_string(*request.context.class_id) : "";
            throw EpisodeFailure(fmt::format("{}{}: {}", to_string(request.context.stage), who, r.error));
        }
        return {std::move(r), index};
    }

    /// Asks a vision question, re-asking with a JSON-only clause on unparseable answers.
    /// Returns nullopt when every answer failed to parse.
    template <class Parse>
    auto ask(VisionQuery query, RequestContext ctx, Parse parse) -> std::optional<decltype(parse(std::string_view {}))>
    {
        auto const base_text = query.text;
        for (int attempt = 0; attempt <= config_.parse_retries; ++attempt)
        {
            query.text = attempt == 0 ? base_text : base_text + std::string(kJsonOnlyClause);
            auto request = ToolRequest {};
            request.tool = ToolKind::vision;
            request.payload = query;
            request.budget = config_.vision_budget;
            request.context = ctx;
            auto [response, index] = exchange(request);
            try
            {
                auto value = parse(response.text);
                transcript_.steps[index].parsed_summary = to_json(value);
                return value;
            }
            catch (const Error& e)
            {
                if (!e.retryable())
                    throw;
                transcript_.steps[index].outcome = std::string("unparseable: ") + e.what();
            }
        }
        return std::nullopt;
    }

    void prepare_query();
    void cognize(ClassId id);
    QuestResult quest(ClassId id, int iteration, const std::optional<Judgement>& feedback);
    BinaryMask segment(ClassId id, const BBox& box, int iteration);
    std::optional<Judgement> judge(ClassId id, const BinaryMask& mask, const BBox& box, int iteration);
    void run_class(ClassId id, const std::vector<PlannedStep>& plan);

    const Episode& episode_;
    Backends& backends_;
    const AgentConfig& config_;
    const TemplateSet& templates_;
    Transcript& transcript_;
    Clock& clock_;
    AgentStage stage_ = AgentStage::planning;

    Image query_;
    std::string query_png_;
    std::string query_grid_png_;
    std::map<ClassId, ClassState> states_;
};

std::vector<PlannedStep> Runner::make_plan()
{
    if (config_.planner_mode == PlannerMode::fixed)
        return canonical_plan();

    auto class_list = std::vector<std::string> {};
    auto summary = std::string {};
    for (auto const& g: episode_.support)
    {
        class_list.push_back(fmt::format("{} ({})", g.class_id.value, g.class_name));
        auto sizes = std::vector<std::string> {};
        for (auto const& ex: g.examples)
            sizes.push_back(fmt::format("{}x{}", ex.bbox.width(), ex.bbox.height()));
        summary += fmt::format("- class {} \"{}\": {} support image(s); object box sizes (px): {}\n", g.class_id.value,
                               g.class_name, g.examples.size(), fmt::join(sizes, ", "));
    }
    auto const text = render_prompt(templates_.get(Stage::plan),
                                    {{"n_way", std::to_string(episode_.spec.n_way)},
                                     {"k_shot", std::to_string(episode_.spec.k_shot)},
                                     {"class_list", fmt::format("{}", fmt::join(class_list, ", "))},
                                     {"support_summary", summary}});

    auto request = ToolRequest {};
    request.tool = ToolKind::chat;
    request.payload = VisionQuery {text, {}};
    request.budget = config_.chat_budget;
    request.context = context(Stage::plan, std::nullopt, 0);
    auto [response, index] = exchange(request);
    auto& step = transcript_.steps[index];
    try
    {
        auto steps = parse_plan(response.text);
        step.parsed_summary = to_json(steps);
        return steps;
    }
    catch (const Error& e)
    {
        if (e.code() != ErrorCode::ParseError && e.code() != ErrorCode::IllegalPlan)
            throw;
        auto steps = canonical_plan();
        step.parsed_summary = to_json(steps);
        step.outcome = std::string("fallback to canonical plan: ") + e.what();
        return steps;
    }
}

void Runner::prepare_query()
{
    query_ = load_image(episode_.query_image_ref);
    query_png_ = encode_png(query_);
    query_grid_png_ = encode_png(query_panel(query_, config_));
}

void Runner::cognize(ClassId id)
{
    go(AgentStage::cognizing);
    auto const& group = episode_.group(id);
    auto query = VisionQuery {};
    auto metadata = std::string {};
    auto const grid = config_.grid_on_support ? std::optional<GridSpec>(config_.grid) : std::nullopt;
    for (std::size_t k = 0; k < group.examples.size(); ++k)
    {
        auto const& ex = group.examples[k];
        query.images.push_back({fmt::format("support_{}", k + 1), encode_png(support_panel(ex, config_))});
        metadata += fmt::format("- support image {}: {}x{} px, object box {}\n", k + 1, ex.mask.width(),
                                ex.mask.height(), box_text(ex.bbox));
    }
    query.text = render_prompt(
        templates_.get(Stage::cognize),
        {{"class_name", group.class_name},
         {"class_id", to_string(id)},
         {"k_shot", std::to_string(group.examples.size())},
         {"box_color_name", color_name(config_.style.box_color)},
         {"mask_color_name", color_name(config_.style.mask_tint)},
         {"grid_note",
          grid ? fmt::format("Coordinate ticks are drawn every {} pixels.", config_.grid.tick_interval) : ""},
         {"metadata", metadata}});

    auto profile = ask(query, context(Stage::cognize, id, 0), [&](std::string_view raw) {
        return parse_cognition(raw, id, group.class_name);
    });
    if (!profile)
        throw EpisodeFailure(fmt::format("cognize class {}: no parseable answer", to_string(id)));
    states_[id].profile = std::move(*profile);
}

QuestResult Runner::quest(ClassId id, int iteration, const std::optional<Judgement>& feedback)
{
    go(AgentStage::questing);
    auto& state = states_[id];
    auto const& group = episode_.group(id);
    auto profile = state.profile.value_or(CognitiveProfile {id, group.class_name, "", {}, ""});

    auto feedback_text = std::string {};
    auto ctx = context(Stage::quest, id, iteration);
    if (feedback && state.box)
    {
        feedback_text = fmt::format("\nYour previous box was {}. A reviewer said: {}\n", box_text(*state.box),
                                    feedback->critique);
        if (feedback->suggestion)
        {
            feedback_text += "Suggested correction: " + describe_suggestion(*feedback->suggestion) + "\n";
            if (auto const* adjust = std::get_if<EdgeAdjust>(&*feedback->suggestion))
                ctx.feedback = *adjust;
        }
        feedback_text += "Propose a corrected box.\n";
        ctx.current_box = state.box;
    }

    auto const grid_note =
        config_.grid.draw_full_grid
            ? fmt::format("A coordinate grid is drawn every {} pixels, labelled along the top and left edges.",
                          config_.grid.tick_interval)
            : fmt::format("Coordinate ticks are drawn every {} pixels along the top and left edges, with labels.",
                          config_.grid.tick_interval);
    auto query = VisionQuery {};
    query.images.push_back({"query", query_grid_png_});
    query.text = render_prompt(
        templates_.get(Stage::quest),
        {{"class_name", group.class_name},
         {"description", profile.description.empty() ? "not available" : profile.description},
         {"attributes", profile.attributes.empty() ? "none" : fmt::format("{}", fmt::join(profile.attributes, "; "))},
         {"spatial_notes", profile.spatial_notes.empty() ? "none" : profile.spatial_notes},
         {"image_width", std::to_string(query_.width())},
         {"image_height", std::to_string(query_.height())},
         {"grid_note", grid_note},
         {"feedback", feedback_text}});

    auto const dims = ImageDims {query_.width(), query_.height()};
    auto result = ask(query, ctx, [&](std::string_view raw) { return parse_quest(raw, dims, id); });
    if (!result)
        throw EpisodeFailure(fmt::format("quest class {}: no parseable answer", to_string(id)));
    return *result;
}

BinaryMask Runner::segment(ClassId id, const BBox& box, int iteration)
{
    go(AgentStage::segmenting);
    auto request = ToolRequest {};
    request.tool = ToolKind::segment;
    request.payload = SegmentQuery {query_png_, {box}};
    request.budget = config_.segment_budget;
    request.context = context(Stage::segment, id, iteration);
    request.context.current_box = box;
    auto [response, index] = exchange(request);
    auto& step = transcript_.steps[index];

    BinaryMask mask;
    try
    {
        mask = decode_mask(response.masks_rle.at(0), MaskFormat::rle);
    }
    catch (const Error& e)
    {
        step.outcome = e.what();
        throw EpisodeFailure(fmt::format("segment class {}: {}", to_string(id), e.what()));
    }
    if (mask.width() != query_.width() || mask.height() != query_.height())
    {
        step.outcome = "mask dimensions differ from the query image";
        throw EpisodeFailure(fmt::format("segment class {}: mask is {}x{}, query is {}x{}", to_string(id),
                                         mask.width(), mask.height(), query_.width(), query_.height()));
    }
    step.parsed_summary = {{"mask_pixels", mask.count()}};
    return mask;
}

std::optional<Judgement> Runner::judge(ClassId id, const BinaryMask& mask, const BBox& box, int iteration)
{
    go(AgentStage::judging);
    auto const& state = states_[id];
    auto const& group = episode_.group(id);
    auto query = VisionQuery {};
    query.images.push_back({"judge_panel", encode_png(compose_judge_panel(query_, mask, box, config_.style))});
    query.text = render_prompt(templates_.get(Stage::judge),
                               {{"class_name", group.class_name},
                                {"description", state.profile ? state.profile->description : "not available"},
                                {"mask_color_name", color_name(config_.style.mask_tint)},
                                {"box_color_name", color_name(config_.style.box_color)}});
    auto ctx = context(Stage::judge, id, iteration);
    ctx.current_box = box;
    ctx.mask = &mask;
    return ask(query, ctx, [](std::string_view raw) { return parse_judgement(raw); });
}

void Runner::run_class(ClassId id, const std::vector<PlannedStep>& plan)
{
    auto covers = [&](Stage stage) {
        return std::any_of(plan.begin(), plan.end(),
                           [&](const PlannedStep& s) { return s.stage == stage && s.scope.covers(id); });
    };
    auto& state = states_[id];

    if (covers(Stage::cognize))
        cognize(id);

    auto q = quest(id, 0, std::nullopt);
    state.present = q.present;
    state.box = q.bbox;
    state.finished = true;
    if (!q.present || !q.bbox || !covers(Stage::segment))
        return;

    state.finished = false;
    auto mask = segment(id, *state.box, 0);
    state.mask = mask;
    state.finished = true;
    if (!covers(Stage::judge))
        return;

    for (int iteration = 0;; ++iteration)
    {
        auto verdict = judge(id, *state.mask, *state.box, iteration);
        if (!verdict || verdict->verdict == Verdict::good || iteration >= config_.max_refinements_per_class)
            return;

        go(AgentStage::refining);
        auto refined = quest(id, iteration + 1, verdict);
        // Presence is decided once; an absent answer during refinement keeps the current mask.
        if (!refined.present || !refined.bbox)
            return;
        auto next = segment(id, *refined.bbox, iteration + 1);
        state.box = refined.bbox;
        state.mask = std::move(next);
    }
}

Prediction Runner::run()
{
    auto prediction = Prediction {};
    try
    {
        prepare_query();
        auto const steps = make_plan();
        for (auto const id: episode_.class_ids())
            run_class(id, steps);
        go(AgentStage::done);
    }
    catch (const EpisodeFailure& e)
    {
        prediction.failed = true;
        prediction.failure_reason = e.what();
    }
    catch (const Error& e)
    {
        prediction.failed = true;
        prediction.failure_reason = e.what();
    }
    if (prediction.failed)
        stage_ = AgentStage::failed;

    for (auto const id: episode_.class_ids())
    {
        auto const& gt = episode_.gt_masks.at(id);
        auto it = states_.find(id);
        auto const usable = it != states_.end() && it->second.finished;
        auto const present = usable && it->second.present;
        prediction.presence[id] = present;
        prediction.masks[id] =
            present && it->second.mask ? *it->second.mask : BinaryMask(gt.width(), gt.height());
    }
    return prediction;
}

} // namespace

Image support_panel(const SupportExample& example, const AgentConfig& config)
{
    auto const grid = config.grid_on_support ? std::optional<GridSpec>(config.grid) : std::nullopt;
    return compose_support_panel(load_image(example.image_ref), example.mask, example.bbox, config.style, grid);
}

Image query_panel(const Image& query, const AgentConfig& config)
{
    return draw_coordinate_grid(query, config.grid);
}

std::vector<PlannedStep> plan(const Episode& episode, Backends& backends, const AgentConfig& config,
                              const TemplateSet& templates, Transcript& transcript)
{
    auto runner = Runner(episode, backends, config, templates, transcript);
    try
    {
        return runner.make_plan();
    }
    catch (const EpisodeFailure& e)
    {
        throw Error(ErrorCode::ToolFailure, e.what());
    }
}

EpisodeResult run_episode(const Episode& episode, Backends& backends, const AgentConfig& config,
                          const TemplateSet& templates, std::string dataset_fingerprint)
{
    auto result = EpisodeResult {};
    auto& t = result.transcript;
    t.episode_id = episode.episode_id;
    t.config = to_json(config);
    t.dataset_fingerprint = std::move(dataset_fingerprint);
    t.episode = describe(episode);

    auto runner = Runner(episode, backends, config, templates, t);
    result.prediction = runner.run();
    t.prediction = result.prediction;
    return result;
}

std::vector<EpisodeResult> run_batch(std::span<const Episode> episodes, Backends& backends, const AgentConfig& config,
                                     int parallelism, const TemplateSet& templates, std::string dataset_fingerprint)
{
    auto results = std::vector<EpisodeResult>(episodes.size());
    auto next = std::atomic<std::size_t> {0};
    auto worker = [&] {
        for (auto i = next++; i < episodes.size(); i = next++)
        {
            try
            {
                results[i] = run_episode(episodes[i], backends, config, templates, dataset_fingerprint);
            }
            catch (const std::exception& e)
            {
                auto& r = results[i];
                r.transcript.episode_id = episodes[i].episode_id;
                r.transcript.config = to_json(config);
                r.transcript.dataset_fingerprint = dataset_fingerprint;
                r.prediction.failed = true;
                r.prediction.failure_reason = e.what();
                for (auto const& [id, gt]: episodes[i].gt_masks)
                {
                    r.prediction.presence[id] = false;
                    r.prediction.masks[id] = BinaryMask(gt.width(), gt.height());
                }
                r.transcript.prediction = r.prediction;
            }
        }
    };

    auto const n = std::clamp<std::size_t>(std::size_t(std::max(1, parallelism)), 1, std::max<std::size_t>(1, episodes.size()));
    auto threads = std::vector<std::thread> {};
    for (std::size_t t = 1; t < n; ++t)
        threads.emplace_back(worker);
    worker();
    for (auto& th: threads)
        th.join();
    return results;
}

} // namespace fscs

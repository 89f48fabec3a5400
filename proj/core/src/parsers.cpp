// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"
#include "fscs/prompts.hpp"
#include "json_extract.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace fscs
{

using nlohmann::json;

namespace
{

[[noreturn]] void parse_error(std::string_view what)
{
    throw Error(ErrorCode::ParseError, std::string(what));
}

std::string lower_trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    std::string out = b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

json require_object(std::string_view raw)
{
    auto found = detail::find_json(raw, '{', [](const json& j) { return j.is_object(); });
    if (!found)
        parse_error("no JSON object in response");
    return std::move(found->second);
}

std::optional<bool> as_flag(const json& j)
{
    if (j.is_boolean())
        return j.get<bool>();
    if (j.is_string())
    {
        auto const s = lower_trim(j.get<std::string>());
        if (s == "true" || s == "yes")
            return true;
        if (s == "false" || s == "no")
            return false;
    }
    return std::nullopt;
}

int as_pixel(const json& j)
{
    if (!j.is_number())
        parse_error("bbox coordinates must be numbers");
    auto const v = j.get<double>();
    if (!std::isfinite(v) || std::abs(v) > 1e7)
        parse_error("bbox coordinate out of range");
    return static_cast<int>(std::lround(v));
}

std::optional<EdgeAdjust> as_edge_adjust(const json& j)
{
    auto const* src = &j;
    if (j.is_object() && j.contains("edge_adjust"))
        src = &j.at("edge_adjust");
    if (src->is_array() && src->size() == 4 && std::all_of(src->begin(), src->end(), [](auto& v) { return v.is_number(); }))
        return EdgeAdjust {as_pixel((*src)[0]), as_pixel((*src)[1]), as_pixel((*src)[2]), as_pixel((*src)[3])};
    if (src->is_object() && src->contains("dx_min") && src->contains("dy_min") && src->contains("dx_max")
        && src->contains("dy_max"))
        return EdgeAdjust {as_pixel(src->at("dx_min")), as_pixel(src->at("dy_min")), as_pixel(src->at("dx_max")),
                           as_pixel(src->at("dy_max"))};
    return std::nullopt;
}

ClassScope parse_scope(const json& j)
{
    if (j.is_null())
        return {};
    if (j.is_string())
    {
        auto const s = lower_trim(j.get<std::string>());
        if (s == "all")
            return {ClassScope::Kind::all, {}};
        if (s == "present")
            return {ClassScope::Kind::present, {}};
        if (s == "segmented")
            return {ClassScope::Kind::segmented, {}};
        parse_error(fmt::format("unknown class scope '{}'", s));
    }
    if (j.is_array())
    {
        auto scope = ClassScope {ClassScope::Kind::listed, {}};
        for (auto const& v: j)
        {
            if (!v.is_number_integer())
                parse_error("class lists must hold integer class ids");
            scope.listed.push_back(ClassId {v.get<int>()});
        }
        std::sort(scope.listed.begin(), scope.listed.end());
        return scope;
    }
    parse_error("class scope must be a string or a list of ids");
}

} // namespace

std::optional<std::string_view> extract_json(std::string_view raw, char open)
{
    auto found = detail::find_json(raw, open);
    if (!found)
        return std::nullopt;
    return found->first;
}

bool ClassScope::covers(ClassId id) const
{
    if (kind != Kind::listed)
        return true;
    return std::binary_search(listed.begin(), listed.end(), id);
}

std::vector<PlannedStep> canonical_plan()
{
    return {
        {Stage::cognize, {ClassScope::Kind::all, {}}},
        {Stage::quest, {ClassScope::Kind::all, {}}},
        {Stage::segment, {ClassScope::Kind::present, {}}},
        {Stage::judge, {ClassScope::Kind::segmented, {}}},
    };
}

void validate_plan(const std::vector<PlannedStep>& plan)
{
    // cognize* quest (segment judge)?
    enum class State
    {
        start,
        quested,
        segmented,
        judged,
    };
    auto state = State::start;
    for (auto const& step: plan)
    {
        auto const illegal = [&] {
            throw Error(ErrorCode::IllegalPlan, fmt::format("stage '{}' not allowed here", to_string(step.stage)));
        };
        switch (state)
        {
            case State::start:
                if (step.stage == Stage::cognize)
                    break;
                if (step.stage != Stage::quest)
                    illegal();
                if (step.scope.kind == ClassScope::Kind::present || step.scope.kind == ClassScope::Kind::segmented)
                    throw Error(ErrorCode::IllegalPlan, "quest must cover every support class");
                state = State::quested;
                break;
            case State::quested:
                if (step.stage != Stage::segment)
                    illegal();
                state = State::segmented;
                break;
            case State::segmented:
                if (step.stage != Stage::judge)
                    illegal();
                state = State::judged;
                break;
            case State::judged: illegal();
        }
    }
    if (state == State::start)
        throw Error(ErrorCode::IllegalPlan, "plan has no quest step");
    if (state == State::segmented)
        throw Error(ErrorCode::IllegalPlan, "segment step must be followed by a judge step");
}

QuestResult parse_quest(std::string_view raw, ImageDims image, ClassId class_id)
{
    auto const obj = require_object(raw);
    auto result = QuestResult {};
    result.class_id = class_id;
    result.raw = std::string(raw);

    if (!obj.contains("present"))
        parse_error("missing 'present'");
    auto const present = as_flag(obj.at("present"));
    if (!present)
        parse_error("'present' must be a boolean");
    result.present = *present;

    if (obj.contains("confidence") && obj.at("confidence").is_number())
        result.confidence = std::clamp(obj.at("confidence").get<double>(), 0.0, 1.0);

    if (!result.present)
        return result;

    if (!obj.contains("bbox"))
        parse_error("present object without 'bbox'");
    auto const& b = obj.at("bbox");
    if (!b.is_array() || b.size() != 4)
        parse_error("'bbox' must be [x_min, y_min, x_max, y_max]");
    auto const box = BBox {as_pixel(b[0]), as_pixel(b[1]), as_pixel(b[2]), as_pixel(b[3])};
    auto const clipped = clip_box(box, image.width, image.height);
    if (!clipped.valid_for(image.width, image.height))
        parse_error(fmt::format("degenerate box {} for {}x{} image", to_string(box), image.width, image.height));
    result.bbox = clipped;
    return result;
}

Judgement parse_judgement(std::string_view raw)
{
    auto const obj = require_object(raw);
    auto j = Judgement {};

    if (!obj.contains("verdict") || !obj.at("verdict").is_string())
        parse_error("missing 'verdict'");
    auto const verdict = lower_trim(obj.at("verdict").get<std::string>());
    if (verdict == "good")
        j.verdict = Verdict::good;
    else if (verdict == "bad")
        j.verdict = Verdict::bad;
    else
        parse_error(fmt::format("verdict '{}' is neither GOOD nor BAD", verdict));

    if (obj.contains("critique") && obj.at("critique").is_string())
        j.critique = obj.at("critique").get<std::string>();

    if (obj.contains("suggestion"))
    {
        auto const& s = obj.at("suggestion");
        if (auto adjust = as_edge_adjust(s))
            j.suggestion = *adjust;
        else if (s.is_object() && s.contains("text") && s.at("text").is_string() && !trim(s.at("text").get<std::string>()).empty())
            j.suggestion = s.at("text").get<std::string>();
        else if (s.is_string() && !trim(s.get<std::string>()).empty())
            j.suggestion = s.get<std::string>();
    }
    if (j.verdict == Verdict::bad && !j.suggestion)
        parse_error("BAD verdict without a suggestion");

    if (obj.contains("criteria_scores") && obj.at("criteria_scores").is_object())
    {
        auto const& c = obj.at("criteria_scores");
        auto score = [&](const char* key) {
            return c.contains(key) && c.at(key).is_number() ? std::clamp(c.at(key).get<double>(), 0.0, 1.0) : 0.0;
        };
        j.criteria_scores = CriteriaScores {score("shape_conformity"), score("coverage"), score("class_confidence")};
    }
    return j;
}

CognitiveProfile parse_cognition(std::string_view raw, ClassId class_id, std::string_view class_name)
{
    auto const text = trim(raw);
    if (text.empty())
        parse_error("empty cognition response");

    auto profile = CognitiveProfile {class_id, std::string(class_name), {}, {}, {}};
    auto found = detail::find_json(raw, '{', [](const json& j) { return j.is_object(); });
    if (found && found->second.contains("description") && found->second.at("description").is_string()
        && !trim(found->second.at("description").get<std::string>()).empty())
    {
        auto const& obj = found->second;
        profile.description = trim(obj.at("description").get<std::string>());
        if (obj.contains("attributes") && obj.at("attributes").is_array())
            for (auto const& a: obj.at("attributes"))
                if (a.is_string())
                    profile.attributes.push_back(a.get<std::string>());
        if (obj.contains("spatial_notes") && obj.at("spatial_notes").is_string())
            profile.spatial_notes = obj.at("spatial_notes").get<std::string>();
        return profile;
    }
    profile.description = text;
    return profile;
}

std::vector<PlannedStep> parse_plan(std::string_view raw)
{
    auto found = detail::find_json(raw, '[', [](const json& j) {
        return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_object(); });
    });
    if (!found)
        parse_error("no JSON array of steps in response");

    std::vector<PlannedStep> plan;
    for (auto const& step: found->second)
    {
        if (!step.contains("stage") || !step.at("stage").is_string())
            parse_error("plan step without 'stage'");
        auto const stage = stage_from_string(lower_trim(step.at("stage").get<std::string>()));
        if (stage == Stage::plan)
            parse_error("'plan' is not an executable stage");
        auto const scope_key = step.contains("classes") ? "classes" : "class_scope";
        plan.push_back({stage, parse_scope(step.contains(scope_key) ? step.at(scope_key) : json())});
    }
    validate_plan(plan);
    return plan;
}

std::string describe_suggestion(const Suggestion& suggestion)
{
    if (auto const* text = std::get_if<std::string>(&suggestion))
        return *text;
    auto const& a = std::get<EdgeAdjust>(suggestion);
    return fmt::format("Move the left edge by {:+d} px, the top edge by {:+d} px, the right edge by {:+d} px and the "
                       "bottom edge by {:+d} px (positive values move right or down).",
                       a.dx_min, a.dy_min, a.dx_max, a.dy_max);
}

json to_json(const CognitiveProfile& p)
{
    return {{"class_id", p.class_id.value},
            {"class_name", p.class_name},
            {"description", p.description},
            {"attributes", p.attributes},
            {"spatial_notes", p.spatial_notes}};
}

json to_json(const QuestResult& r)
{
    auto j = json {{"class_id", r.class_id.value}, {"present", r.present}};
    if (r.bbox)
        j["bbox"] = {r.bbox->x_min, r.bbox->y_min, r.bbox->x_max, r.bbox->y_max};
    if (r.confidence)
        j["confidence"] = *r.confidence;
    return j;
}

json to_json(const Judgement& jd)
{
    auto j = json {{"verdict", jd.verdict == Verdict::good ? "GOOD" : "BAD"}, {"critique", jd.critique}};
    if (jd.suggestion)
    {
        if (auto const* a = std::get_if<EdgeAdjust>(&*jd.suggestion))
            j["suggestion"] = {{"edge_adjust", {a->dx_min, a->dy_min, a->dx_max, a->dy_max}},
                               {"text", describe_suggestion(*jd.suggestion)}};
        else
            j["suggestion"] = std::get<std::string>(*jd.suggestion);
    }
    if (jd.criteria_scores)
        j["criteria_scores"] = {{"shape_conformity", jd.criteria_scores->shape_conformity},
                                {"coverage", jd.criteria_scores->coverage},
                                {"class_confidence", jd.criteria_scores->class_confidence}};
    return j;
}

json to_json(const std::vector<PlannedStep>& plan)
{
    auto arr = json::array();
    for (auto const& step: plan)
    {
        json scope;
        switch (step.scope.kind)
        {
            case ClassScope::Kind::all: scope = "all"; break;
            case ClassScope::Kind::present: scope = "present"; break;
            case ClassScope::Kind::segmented: scope = "segmented"; break;
            case ClassScope::Kind::listed:
                scope = json::array();
                for (auto id: step.scope.listed)
                    scope.push_back(id.value);
                break;
        }
        arr.push_back({{"stage", to_string(step.stage)}, {"classes", scope}});
    }
    return arr;
}

} // namespace fscs

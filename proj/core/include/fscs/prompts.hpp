// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/class_id.hpp"
#include "fscs/geometry.hpp"
#include "fscs/image_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fscs
{

enum class Stage
{
    plan,
    cognize,
    quest,
    segment,
    judge,
};

std::string_view to_string(Stage stage);
/// Throws ParseError for unknown names.
Stage stage_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Templates

struct IclExample
{
    std::string input;
    std::string response;
};

/// Text with `{name}` placeholders. `{{` and `}}` are literal braces. The reserved
/// placeholder `{icl_examples}` expands to the formatted in-context exemplars.
struct PromptTemplate
{
    Stage stage = Stage::plan;
    int version = 1;
    std::string text;
    std::set<std::string> required_placeholders;
    std::vector<IclExample> icl_examples;

    /// Builds from a template text and its JSON sidecar. Throws InvalidTemplate.
    static PromptTemplate from_assets(std::string text, const nlohmann::json& sidecar);
};

using Bindings = std::map<std::string, std::string, std::less<>>;

inline constexpr std::string_view kIclPlaceholder = "icl_examples";

/// Throws UnboundPlaceholder if any placeholder in the text has no binding.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

/// Names of all placeholders appearing in `text`, in order of first appearance.
std::vector<std::string> placeholders_in(std::string_view text);

class TemplateSet
{
public:
    /// The templates compiled into the library.
    static const TemplateSet& defaults();
    /// Reads `<stage>.txt` + `<stage>.json` for plan, cognize, quest, judge.
    static TemplateSet load(const std::filesystem::path& dir);

    [[nodiscard]] const PromptTemplate& get(Stage stage) const;
    void set(PromptTemplate tmpl);

private:
    std::map<Stage, PromptTemplate> templates_;
};

/// Clause appended when re-asking after an unparseable answer.
inline constexpr std::string_view kJsonOnlyClause =
    "\n\nYour previous answer could not be parsed. Respond with valid JSON only, in a single ```json fenced block.";

// ---------------------------------------------------------------------------
// Structured stage results

struct CognitiveProfile
{
    ClassId class_id;
    std::string class_name;
    std::string description;
    std::vector<std::string> attributes;
    std::string spatial_notes;

    bool operator==(const CognitiveProfile&) const = default;
};

struct QuestResult
{
    ClassId class_id;
    bool present = false;
    std::optional<BBox> bbox;
    std::optional<double> confidence;
    std::string raw;
};

enum class Verdict
{
    good,
    bad,
};

using Suggestion = std::variant<std::string, EdgeAdjust>;

struct CriteriaScores
{
    double shape_conformity = 0;
    double coverage = 0;
    double class_confidence = 0;
};

struct Judgement
{
    Verdict verdict = Verdict::good;
    std::string critique;
    std::optional<Suggestion> suggestion;
    std::optional<CriteriaScores> criteria_scores;
};

/// Which support classes a planned step applies to.
struct ClassScope
{
    enum class Kind
    {
        all,
        present,
        segmented,
        listed,
    };

    Kind kind = Kind::all;
    std::vector<ClassId> listed;

    [[nodiscard]] bool covers(ClassId id) const;
    bool operator==(const ClassScope&) const = default;
};

struct PlannedStep
{
    Stage stage = Stage::quest;
    ClassScope scope;

    bool operator==(const PlannedStep&) const = default;
};

/// cognize(all) -> quest(all) -> segment(present) -> judge(segmented)
std::vector<PlannedStep> canonical_plan();

/// Legal orderings: cognize* quest (segment judge)?. Throws IllegalPlan.
void validate_plan(const std::vector<PlannedStep>& plan);

// ---------------------------------------------------------------------------
// Response parsing

/// First balanced JSON value opening with `open` ('{' or '[') that parses, as a view into `raw`.
std::optional<std::string_view> extract_json(std::string_view raw, char open = '{');

/// Boxes are clipped to the image; zero-area boxes are a ParseError.
QuestResult parse_quest(std::string_view raw, ImageDims image, ClassId class_id = {});
Judgement parse_judgement(std::string_view raw);
CognitiveProfile parse_cognition(std::string_view raw, ClassId class_id, std::string_view class_name);
/// Throws ParseError on malformed JSON, IllegalPlan on grammar violations.
std::vector<PlannedStep> parse_plan(std::string_view raw);

/// Plain-language rendering used to feed a suggestion into the next quest prompt.
std::string describe_suggestion(const Suggestion& suggestion);

nlohmann::json to_json(const CognitiveProfile& profile);
nlohmann::json to_json(const QuestResult& result);
nlohmann::json to_json(const Judgement& judgement);
nlohmann::json to_json(const std::vector<PlannedStep>& plan);

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"
#include "fscs/image_io.hpp"
#include "fscs/prompts.hpp"

#include <fmt/format.h>

#include <cctype>

namespace fscs
{

using nlohmann::json;

namespace
{

struct TemplateAsset
{
    const char* stage;
    const char* text;
    const char* sidecar;
};

constexpr TemplateAsset kDefaultAssets[] = {
#include "default_templates.inc"
};

bool is_name_char(char c, bool first)
{
    auto const u = static_cast<unsigned char>(c);
    return std::islower(u) || c == '_' || (!first && std::isdigit(u));
}

/// Calls `on_text(chunk)` for literal text and `on_name(name)` for each placeholder.
template <typename OnText, typename OnName>
void scan_template(std::string_view text, OnText&& on_text, OnName&& on_name)
{
    std::size_t i = 0;
    while (i < text.size())
    {
        char const c = text[i];
        if ((c == '{' || c == '}') && i + 1 < text.size() && text[i + 1] == c)
        {
            on_text(text.substr(i, 1));
            i += 2;
            continue;
        }
        if (c == '{' && i + 1 < text.size() && is_name_char(text[i + 1], true))
        {
            auto j = i + 1;
            while (j < text.size() && is_name_char(text[j], false))
                ++j;
            if (j < text.size() && text[j] == '}')
            {
                on_name(text.substr(i + 1, j - i - 1));
                i = j + 1;
                continue;
            }
        }
        on_text(text.substr(i, 1));
        ++i;
    }
}

std::string format_examples(const std::vector<IclExample>& examples)
{
    std::string out;
    for (std::size_t i = 0; i < examples.size(); ++i)
    {
        if (i > 0)
            out += "\n\n";
        out += fmt::format("Example {}\nInput: {}\nResponse: {}", i + 1, examples[i].input, examples[i].response);
    }
    return out;
}

} // namespace

std::string_view to_string(Stage stage)
{
    switch (stage)
    {
        case Stage::plan: return "plan";
        case Stage::cognize: return "cognize";
        case Stage::quest: return "quest";
        case Stage::segment: return "segment";
        case Stage::judge: return "judge";
    }
    return "unknown";
}

Stage stage_from_string(std::string_view name)
{
    for (auto s: {Stage::plan, Stage::cognize, Stage::quest, Stage::segment, Stage::judge})
        if (to_string(s) == name)
            return s;
    throw Error(ErrorCode::ParseError, fmt::format("unknown stage '{}'", name));
}

std::vector<std::string> placeholders_in(std::string_view text)
{
    std::vector<std::string> names;
    scan_template(
        text, [](std::string_view) {},
        [&](std::string_view name) {
            if (std::find(names.begin(), names.end(), name) == names.end())
                names.emplace_back(name);
        });
    return names;
}

PromptTemplate PromptTemplate::from_assets(std::string text, const json& sidecar)
{
    auto t = PromptTemplate {};
    try
    {
        t.stage = stage_from_string(sidecar.at("stage").get<std::string>());
        t.version = sidecar.value("version", 1);
        for (auto const& name: sidecar.value("required_placeholders", json::array()))
            t.required_placeholders.insert(name.get<std::string>());
        for (auto const& ex: sidecar.value("icl_examples", json::array()))
            t.icl_examples.push_back({ex.at("input").get<std::string>(), ex.at("response").get<std::string>()});
    }
    catch (const std::exception& e)
    {
        throw Error(ErrorCode::InvalidTemplate, fmt::format("bad template sidecar: {}", e.what()));
    }
    t.text = std::move(text);

    auto const present = placeholders_in(t.text);
    for (auto const& name: t.required_placeholders)
        if (std::find(present.begin(), present.end(), name) == present.end())
            throw Error(ErrorCode::InvalidTemplate,
                        fmt::format("{} template lacks required placeholder '{}'", to_string(t.stage), name));
    return t;
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings)
{
    for (auto const& name: tmpl.required_placeholders)
        if (!bindings.contains(name))
            throw Error(ErrorCode::UnboundPlaceholder, fmt::format("'{}' is not bound", name));

    auto const examples = format_examples(tmpl.icl_examples);
    bool used_examples = false;
    std::string out;
    out.reserve(tmpl.text.size() + examples.size());
    scan_template(
        tmpl.text, [&](std::string_view chunk) { out.append(chunk); },
        [&](std::string_view name) {
            if (name == kIclPlaceholder)
            {
                out += examples;
                used_examples = true;
                return;
            }
            auto const it = bindings.find(name);
            if (it == bindings.end())
                throw Error(ErrorCode::UnboundPlaceholder, fmt::format("'{}' is not bound", name));
            out += it->second;
        });

    if (!used_examples && !tmpl.icl_examples.empty())
        out = examples + "\n\n" + out;
    return out;
}

const TemplateSet& TemplateSet::defaults()
{
    static TemplateSet const set = [] {
        TemplateSet s;
        for (auto const& asset: kDefaultAssets)
            s.set(PromptTemplate::from_assets(asset.text, json::parse(asset.sidecar)));
        return s;
    }();
    return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir)
{
    TemplateSet s;
    for (auto stage: {Stage::plan, Stage::cognize, Stage::quest, Stage::judge})
    {
        auto const base = dir / std::string(to_string(stage));
        std::string text;
        std::string sidecar;
        try
        {
            text = read_file(base.string() + ".txt");
            sidecar = read_file(base.string() + ".json");
        }
        catch (const Error& e)
        {
            throw Error(ErrorCode::InvalidTemplate, e.what());
        }
        json parsed;
        try
        {
            parsed = json::parse(sidecar);
        }
        catch (const json::exception& e)
        {
            throw Error(ErrorCode::InvalidTemplate, fmt::format("{}.json: {}", base.string(), e.what()));
        }
        auto t = PromptTemplate::from_assets(std::move(text), parsed);
        if (t.stage != stage)
            throw Error(ErrorCode::InvalidTemplate, fmt::format("{}.json declares stage {}", base.string(), to_string(t.stage)));
        s.set(std::move(t));
    }
    return s;
}

const PromptTemplate& TemplateSet::get(Stage stage) const
{
    auto const it = templates_.find(stage);
    if (it == templates_.end())
        throw Error(ErrorCode::InvalidTemplate, fmt::format("no template for stage {}", to_string(stage)));
    return it->second;
}

void TemplateSet::set(PromptTemplate tmpl)
{
    auto const stage = tmpl.stage;
    templates_.insert_or_assign(stage, std::move(tmpl));
}

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#include "json_extract.hpp"

#include <vector>

namespace fscs::detail
{

std::optional<std::size_t> balanced_end(std::string_view raw, std::size_t start)
{
    std::vector<char> stack;
    bool in_string = false;
    bool escaped = false;
    for (auto i = start; i < raw.size(); ++i)
    {
        char const c = raw[i];
        if (in_string)
        {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        switch (c)
        {
            case '"': in_string = true; break;
            case '{': stack.push_back('}'); break;
            case '[': stack.push_back(']'); break;
            case '}':
            case ']':
                if (stack.empty() || stack.back() != c)
                    return std::nullopt;
                stack.pop_back();
                if (stack.empty())
                    return i + 1;
                break;
            default: break;
        }
    }
    return std::nullopt;
}

std::optional<std::pair<std::string_view, nlohmann::json>> find_json(
    std::string_view raw, char open, const std::function<bool(const nlohmann::json&)>& accept)
{
    for (auto pos = raw.find(open); pos != std::string_view::npos; pos = raw.find(open, pos + 1))
    {
        auto const end = balanced_end(raw, pos);
        if (!end)
            continue;
        auto const candidate = raw.substr(pos, *end - pos);
        auto parsed = nlohmann::json::parse(candidate, nullptr, false);
        if (parsed.is_discarded())
            continue;
        if (accept && !accept(parsed))
            continue;
        return std::pair {candidate, std::move(parsed)};
    }
    return std::nullopt;
}

} // namespace fscs::detail

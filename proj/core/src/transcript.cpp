// SPDX-License-Identifier: Apache-2.0
#include "fscs/transcript.hpp"

#include "fscs/error.hpp"
#include "fscs/hashing.hpp"
#include "fscs/image_io.hpp"
#include "fscs/mask_codec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>

namespace fscs
{

using nlohmann::json;

namespace
{

ClassId class_key(const std::string& key)
{
    try
    {
        std::size_t used = 0;
        auto const v = std::stoi(key, &used);
        if (used == key.size())
            return ClassId {v};
    }
    catch (const std::exception&)
    {
    }
    throw Error(ErrorCode::MalformedEncoding, "bad class key '" + key + "'");
}

ToolKind tool_from_string(std::string_view s)
{
    if (s == "chat")
        return ToolKind::chat;
    if (s == "vision")
        return ToolKind::vision;
    if (s == "segment")
        return ToolKind::segment;
    throw Error(ErrorCode::MalformedEncoding, fmt::format("unknown tool '{}'", s));
}

ToolStatus status_from_string(std::string_view s)
{
    if (s == "ok")
        return ToolStatus::ok;
    if (s == "retryable_error")
        return ToolStatus::retryable_error;
    if (s == "fatal_error")
        return ToolStatus::fatal_error;
    throw Error(ErrorCode::MalformedEncoding, fmt::format("unknown status '{}'", s));
}

} // namespace

json to_json(const Prediction& p)
{
    auto presence = json::object();
    for (auto const& [id, v]: p.presence)
        presence[to_string(id)] = v;
    auto masks = json::object();
    for (auto const& [id, m]: p.masks)
        masks[to_string(id)] = base64_encode(encode_mask(m, MaskFormat::rle));
    return {{"presence", presence},
            {"masks", masks},
            {"failed", p.failed},
            {"failure_reason", p.failure_reason ? json(*p.failure_reason) : json(nullptr)}};
}

Prediction prediction_from_json(const json& j)
{
    try
    {
        auto p = Prediction {};
        for (auto const& [k, v]: j.at("presence").items())
            p.presence[class_key(k)] = v.get<bool>();
        for (auto const& [k, v]: j.at("masks").items())
            p.masks[class_key(k)] = decode_mask(base64_decode(v.get<std::string>()), MaskFormat::rle);
        p.failed = j.value("failed", false);
        if (j.contains("failure_reason") && !j["failure_reason"].is_null())
            p.failure_reason = j["failure_reason"].get<std::string>();
        return p;
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::MalformedEncoding, std::string("prediction: ") + e.what());
    }
}

json to_json(const StepRecord& s)
{
    return {{"type", "step"},
            {"ordinal", s.ordinal},
            {"stage", to_string(s.stage)},
            {"tool", to_string(s.tool)},
            {"class_id", s.class_id ? json(s.class_id->value) : json(nullptr)},
            {"iteration", s.iteration},
            {"request_hash", s.request_hash},
            {"prompt_text", s.prompt_text},
            {"image_refs", s.image_refs},
            {"raw_response", s.raw_response},
            {"parsed_summary", s.parsed_summary},
            {"status", to_string(s.status)},
            {"attempt_count", s.attempt_count},
            {"latency_ms", s.latency_ms},
            {"outcome", s.outcome}};
}

StepRecord step_from_json(const json& j)
{
    try
    {
        auto s = StepRecord {};
        s.ordinal = j.at("ordinal").get<int>();
        s.stage = stage_from_string(j.at("stage").get<std::string>());
        s.tool = tool_from_string(j.at("tool").get<std::string>());
        if (!j.at("class_id").is_null())
            s.class_id = ClassId {j["class_id"].get<int>()};
        s.iteration = j.at("iteration").get<int>();
        s.request_hash = j.at("request_hash").get<std::string>();
        s.prompt_text = j.at("prompt_text").get<std::string>();
        s.image_refs = j.at("image_refs").get<std::vector<std::string>>();
        s.raw_response = j.at("raw_response").get<std::string>();
        s.parsed_summary = j.value("parsed_summary", json());
        s.status = status_from_string(j.at("status").get<std::string>());
        s.attempt_count = j.at("attempt_count").get<int>();
        s.latency_ms = j.at("latency_ms").get<double>();
        s.outcome = j.value("outcome", "");
        return s;
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::MalformedEncoding, std::string("transcript step: ") + e.what());
    }
    catch (const Error& e)
    {
        throw Error(ErrorCode::MalformedEncoding, std::string("transcript step: ") + e.what());
    }
}

std::string serialize_transcript(const Transcript& t)
{
    auto out = std::string {};
    auto header = json {{"type", "header"},
                        {"episode_id", t.episode_id},
                        {"config", t.config},
                        {"dataset_fingerprint", t.dataset_fingerprint},
                        {"episode", t.episode ? to_json(*t.episode) : json(nullptr)}};
    out += header.dump() + "\n";
    for (auto const& s: t.steps)
        out += to_json(s).dump() + "\n";
    out += json {{"type", "footer"}, {"prediction", to_json(t.prediction)}}.dump() + "\n";
    return out;
}

Transcript parse_transcript(std::string_view text)
{
    auto t = Transcript {};
    auto in = std::istringstream(std::string(text));
    auto line = std::string {};
    bool header = false, footer = false;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto const j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error(ErrorCode::MalformedEncoding, fmt::format("transcript line {} is not a JSON object", line_no));
        if (footer)
            throw Error(ErrorCode::MalformedEncoding, "content after transcript footer");
        auto const type = j.value("type", "");
        if (type == "header")
        {
            if (header)
                throw Error(ErrorCode::MalformedEncoding, "duplicate transcript header");
            header = true;
            t.episode_id = j.value("episode_id", "");
            t.config = j.value("config", json());
            t.dataset_fingerprint = j.value("dataset_fingerprint", "");
            if (j.contains("episode") && !j["episode"].is_null())
                t.episode = descriptor_from_json(j["episode"]);
        }
        else if (!header)
        {
            throw Error(ErrorCode::MalformedEncoding, "transcript does not start with a header");
        }
        else if (type == "step")
        {
            t.steps.push_back(step_from_json(j));
        }
        else if (type == "footer")
        {
            footer = true;
            t.prediction = prediction_from_json(j.at("prediction"));
        }
        else
        {
            throw Error(ErrorCode::MalformedEncoding, fmt::format("unknown transcript line type '{}'", type));
        }
    }
    if (!header || !footer)
        throw Error(ErrorCode::MalformedEncoding, "transcript is missing its header or footer");
    return t;
}

void write_transcript(const std::filesystem::path& path, const Transcript& transcript)
{
    write_file(path, serialize_transcript(transcript));
}

Transcript read_transcript(const std::filesystem::path& path)
{
    return parse_transcript(read_file(path));
}

std::vector<Transcript> read_transcript_dir(const std::filesystem::path& dir)
{
    auto paths = std::vector<std::filesystem::path> {};
    for (auto const& entry: std::filesystem::directory_iterator(dir))
    {
        auto const name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".transcript.jsonl"))
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    auto out = std::vector<Transcript> {};
    for (auto const& p: paths)
        out.push_back(read_transcript(p));
    return out;
}

std::string transcript_file_name(std::string_view episode_id)
{
    return fmt::format("{}.transcript.jsonl", episode_id);
}

Transcript without_latency(Transcript transcript)
{
    for (auto& s: transcript.steps)
        s.latency_ms = 0;
    return transcript;
}

// ---------------------------------------------------------------------------

ReplayBackend::ReplayBackend(std::vector<Transcript> transcripts)
{
    for (auto& t: transcripts)
        cursors_[t.episode_id] = Cursor {std::move(t.steps), 0};
}

ToolResponse ReplayBackend::attempt(const ToolRequest& request)
{
    auto fatal = [](ErrorCode code, std::string message) {
        auto r = ToolResponse {};
        r.status = ToolStatus::fatal_error;
        r.error = std::move(message);
        r.error_code = code;
        return r;
    };

    std::lock_guard lock(mutex_);
    Cursor* cursor = nullptr;
    if (request.context.episode != nullptr)
    {
        auto it = cursors_.find(request.context.episode->episode_id);
        if (it != cursors_.end())
            cursor = &it->second;
    }
    else if (cursors_.size() == 1)
    {
        cursor = &cursors_.begin()->second;
    }
    if (cursor == nullptr)
        return fatal(ErrorCode::TranscriptExhausted, "no transcript recorded for this episode");
    if (cursor->next >= cursor->steps.size())
        return fatal(ErrorCode::TranscriptExhausted,
                     fmt::format("all {} recorded responses already served", cursor->steps.size()));

    auto const& step = cursor->steps[cursor->next];
    auto const hash = request.hash();
    if (step.tool != request.tool || step.request_hash != hash)
        return fatal(ErrorCode::RequestMismatch,
                     fmt::format("request {} does not match recorded step {} ({})", hash.substr(0, 12), step.ordinal,
                                 step.request_hash.substr(0, 12)));
    ++cursor->next;

    auto r = ToolResponse::from_raw_body(step.tool, step.raw_response);
    r.status = step.status;
    if (step.status != ToolStatus::ok)
        r.error = step.outcome;
    return r;
}

std::size_t ReplayBackend::remaining(std::string_view episode_id) const
{
    std::lock_guard lock(mutex_);
    auto it = cursors_.find(episode_id);
    return it == cursors_.end() ? 0 : it->second.steps.size() - it->second.next;
}

} // namespace fscs

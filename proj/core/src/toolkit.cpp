// SPDX-License-Identifier: Apache-2.0
#include "fscs/toolkit.hpp"

#include "fscs/error.hpp"
#include "fscs/hashing.hpp"
#include "fscs/rng.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace fscs
{

using nlohmann::json;

std::string_view to_string(ToolKind kind)
{
    switch (kind)
    {
        case ToolKind::chat: return "chat";
        case ToolKind::vision: return "vision";
        case ToolKind::segment: return "segment";
    }
    return "unknown";
}

std::string_view to_string(ToolStatus status)
{
    switch (status)
    {
        case ToolStatus::ok: return "ok";
        case ToolStatus::retryable_error: return "retryable_error";
        case ToolStatus::fatal_error: return "fatal_error";
    }
    return "unknown";
}

std::string ToolRequest::prompt_text() const
{
    if (auto const* q = std::get_if<VisionQuery>(&payload))
        return q->text;
    auto const& s = std::get<SegmentQuery>(payload);
    auto boxes = json::array();
    for (auto const& b: s.boxes)
        boxes.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
    return "segment boxes=" + boxes.dump();
}

std::vector<std::string> ToolRequest::image_hashes() const
{
    std::vector<std::string> out;
    if (auto const* q = std::get_if<VisionQuery>(&payload))
        for (auto const& img: q->images)
            out.push_back(sha256_hex(img.png));
    else
        out.push_back(sha256_hex(std::get<SegmentQuery>(payload).image_png));
    return out;
}

std::string ToolRequest::hash() const
{
    auto key = fmt::format("{}\n{}\n", to_string(tool), prompt_text());
    for (auto const& h: image_hashes())
        key += h + "\n";
    return sha256_hex(key);
}

std::size_t ToolRequest::payload_bytes() const
{
    if (auto const* q = std::get_if<VisionQuery>(&payload))
    {
        auto n = q->text.size();
        for (auto const& img: q->images)
            n += img.png.size();
        return n;
    }
    auto const& s = std::get<SegmentQuery>(payload);
    return s.image_png.size() + s.boxes.size() * sizeof(BBox);
}

std::string ToolResponse::raw_body(ToolKind kind) const
{
    if (kind != ToolKind::segment)
        return text;
    auto masks = json::array();
    for (auto const& m: masks_rle)
        masks.push_back(base64_encode(m));
    return json {{"masks", masks}}.dump();
}

ToolResponse ToolResponse::from_raw_body(ToolKind kind, const std::string& raw)
{
    auto r = ToolResponse {};
    if (kind != ToolKind::segment)
    {
        r.text = raw;
        return r;
    }
    if (raw.empty())
        return r;
    auto const j = json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.contains("masks"))
        throw Error(ErrorCode::MalformedEncoding, "recorded segment body is not a mask list");
    for (auto const& m: j.at("masks"))
        r.masks_rle.push_back(base64_decode(m.get<std::string>()));
    return r;
}

void SystemClock::sleep_for(std::chrono::milliseconds duration)
{
    std::this_thread::sleep_for(duration);
}

SystemClock& SystemClock::instance()
{
    static SystemClock clock;
    return clock;
}

std::chrono::steady_clock::time_point FakeClock::now()
{
    std::lock_guard lock(mutex_);
    return now_;
}

void FakeClock::sleep_for(std::chrono::milliseconds duration)
{
    std::lock_guard lock(mutex_);
    sleeps_.push_back(duration);
    now_ += duration;
}

void FakeClock::advance(std::chrono::milliseconds duration)
{
    std::lock_guard lock(mutex_);
    now_ += duration;
}

std::vector<std::chrono::milliseconds> FakeClock::sleeps() const
{
    std::lock_guard lock(mutex_);
    return sleeps_;
}

std::chrono::milliseconds RetryPolicy::delay_for(int retry, std::string_view request_hash) const
{
    auto const exponential = double(base_delay.count()) * std::pow(2.0, retry);
    auto const capped = std::min(exponential, double(max_delay.count()));
    auto rng = Rng::keyed(fmt::format("backoff|{}|{}|{}", jitter_seed, request_hash, retry));
    auto const factor = 1.0 + jitter * (2.0 * rng.uniform() - 1.0);
    return std::chrono::milliseconds(std::llround(std::max(0.0, capped * factor)));
}

ToolStatus classify_http_status(int status)
{
    if (status >= 200 && status < 300)
        return ToolStatus::ok;
    if (status == 408 || status == 429 || status >= 500)
        return ToolStatus::retryable_error;
    return ToolStatus::fatal_error;
}

namespace
{

/// Checks the response invariants; a violation is a malformed transport, which is retryable.
void check_contract(const ToolRequest& request, ToolResponse& r)
{
    if (r.status != ToolStatus::ok)
        return;
    if (request.tool == ToolKind::segment)
    {
        auto const expected = std::get<SegmentQuery>(request.payload).boxes.size();
        if (r.masks_rle.size() != expected)
        {
            r.status = ToolStatus::retryable_error;
            r.error = fmt::format("segment returned {} masks for {} boxes", r.masks_rle.size(), expected);
        }
    }
    else if (r.text.empty())
    {
        r.status = ToolStatus::retryable_error;
        r.error = "empty response body";
    }
}

} // namespace

ToolResponse call(ToolBackend& backend, const ToolRequest& request, const RetryPolicy& policy, Clock& clock)
{
    auto const start = clock.now();
    auto finish = [&](ToolResponse r, int attempts) {
        r.attempt_count = attempts;
        r.latency_ms = std::chrono::duration<double, std::milli>(clock.now() - start).count();
        return r;
    };

    if (request.payload_bytes() > policy.max_payload_bytes)
    {
        auto r = ToolResponse {};
        r.status = ToolStatus::fatal_error;
        r.error = fmt::format("payload of {} bytes exceeds the {} byte limit", request.payload_bytes(),
                              policy.max_payload_bytes);
        return finish(std::move(r), 0);
    }

    auto const max_attempts = std::max(0, request.budget.max_retries) + 1;
    auto const request_hash = request.hash();
    for (int attempt = 1;; ++attempt)
    {
        ToolResponse r;
        try
        {
            r = backend.attempt(request);
        }
        catch (const Error& e)
        {
            r = {};
            r.status = ToolStatus::fatal_error;
            r.error = e.what();
            r.error_code = e.code();
        }
        catch (const std::exception& e)
        {
            r = {};
            r.status = ToolStatus::fatal_error;
            r.error = e.what();
        }
        check_contract(request, r);

        if (r.status != ToolStatus::retryable_error)
            return finish(std::move(r), attempt);
        if (attempt >= max_attempts)
        {
            r.status = ToolStatus::fatal_error;
            r.error = fmt::format("retry budget exhausted after {} attempt(s): {}", attempt, r.error);
            return finish(std::move(r), attempt);
        }
        clock.sleep_for(policy.delay_for(attempt - 1, request_hash));
    }
}

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"
#include "fscs/hashing.hpp"
#include "fscs/image_io.hpp"
#include "fscs/mask_codec.hpp"
#include "fscs/toolkit.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace fscs
{

using nlohmann::json;

namespace
{

constexpr int kMaxImageEdge = 4096;

ToolResponse failure(ToolStatus status, std::string message, int http_status = 0)
{
    auto r = ToolResponse {};
    r.status = status;
    r.error = std::move(message);
    r.http_status = http_status;
    return r;
}

} // namespace

HttpBackend::HttpBackend(HttpEndpoint endpoint, Clock& clock): endpoint_(std::move(endpoint))
{
    if (endpoint_.base_url.empty())
        throw Error(ErrorCode::ConfigError, "http backend needs a base_url");
    if (endpoint_.requests_per_minute > 0)
        limiter_ = std::make_unique<RateLimiter>(endpoint_.requests_per_minute, 1, clock);
}

HttpBackend::~HttpBackend() = default;

json HttpBackend::complete_body(const VisionQuery& query, std::string_view model)
{
    auto parts = json::array();
    parts.push_back({{"kind", "text"}, {"data", query.text}});
    for (auto const& img: query.images)
        parts.push_back({{"kind", "image_png_base64"}, {"data", base64_encode(img.png)}});
    auto body = json {{"messages", json::array({json {{"role", "user"}, {"parts", parts}}})}};
    if (!model.empty())
        body["model"] = model;
    return body;
}

json HttpBackend::segment_body(const SegmentQuery& query)
{
    auto boxes = json::array();
    for (auto const& b: query.boxes)
        boxes.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
    return {{"image_png_base64", base64_encode(query.image_png)}, {"boxes", boxes}};
}

ToolResponse HttpBackend::attempt(const ToolRequest& request)
{
    auto headers = httplib::Headers {};
    if (!endpoint_.api_key_env.empty())
    {
        auto const* key = std::getenv(endpoint_.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
        {
            auto r = failure(ToolStatus::fatal_error,
                             fmt::format("environment variable {} is not set", endpoint_.api_key_env));
            r.error_code = ErrorCode::AuthError;
            return r;
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto const is_segment = request.tool == ToolKind::segment;
    auto const path = is_segment ? "/v1/segment" : "/v1/complete";
    auto const body = is_segment ? segment_body(std::get<SegmentQuery>(request.payload))
                                 : complete_body(std::get<VisionQuery>(request.payload), endpoint_.model);

    if (limiter_)
        limiter_->acquire();

    httplib::Client client(endpoint_.base_url);
    auto const timeout = std::chrono::milliseconds(request.budget.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        return failure(ToolStatus::retryable_error, "transport: " + httplib::to_string(res.error()));

    auto const status = classify_http_status(res->status);
    if (status != ToolStatus::ok)
    {
        auto r = failure(status, fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200)), res->status);
        if (res->status == 401 || res->status == 403)
            r.error_code = ErrorCode::AuthError;
        return r;
    }

    auto const reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object())
        return failure(ToolStatus::retryable_error, "malformed response body", res->status);

    auto r = ToolResponse {};
    r.http_status = res->status;
    try
    {
        if (is_segment)
            for (auto const& m: reply.at("masks"))
                r.masks_rle.push_back(base64_decode(m.get<std::string>()));
        else
            r.text = reply.at("text").get<std::string>();
    }
    catch (const std::exception& e)
    {
        return failure(ToolStatus::retryable_error, std::string("malformed response body: ") + e.what(),
                       res->status);
    }
    return r;
}

// ---------------------------------------------------------------------------

struct SegmentServer::Impl
{
    std::shared_ptr<ToolBackend> backend;
    httplib::Server server;
    std::thread thread;
    int port = 0;
};

namespace
{

void reply_error(httplib::Response& res, int status, const std::string& message)
{
    res.status = status;
    res.set_content(json {{"error", message}}.dump(), "application/json");
}

} // namespace

SegmentServer::SegmentServer(std::shared_ptr<ToolBackend> backend): impl_(std::make_unique<Impl>())
{
    impl_->backend = std::move(backend);
    auto& impl = *impl_;

    impl.server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ready"})", "application/json");
    });

    impl.server.Post("/v1/segment", [&impl](const httplib::Request& req, httplib::Response& res) {
        auto const body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("image_png_base64")
            || !body.contains("boxes") || !body["image_png_base64"].is_string() || !body["boxes"].is_array())
            return reply_error(res, 400, "expected {image_png_base64, boxes}");

        auto query = SegmentQuery {};
        Image image;
        try
        {
            query.image_png = base64_decode(body["image_png_base64"].get<std::string>());
            image = decode_png(query.image_png);
        }
        catch (const std::exception& e)
        {
            return reply_error(res, 400, std::string("bad image: ") + e.what());
        }
        if (image.width() > kMaxImageEdge || image.height() > kMaxImageEdge)
            return reply_error(res, 413, "image too large");

        for (auto const& b: body["boxes"])
        {
            if (!b.is_array() || b.size() != 4 || !std::all_of(b.begin(), b.end(), [](auto const& v) {
                    return v.is_number_integer();
                }))
                return reply_error(res, 400, "each box must be [x_min, y_min, x_max, y_max]");
            auto const box = BBox {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
            if (!box.valid_for(image.width(), image.height()))
                return reply_error(res, 400, "box out of bounds: " + to_string(box));
            query.boxes.push_back(box);
        }

        auto request = ToolRequest {};
        request.tool = ToolKind::segment;
        request.payload = query;
        request.context.stage = Stage::segment;
        auto const r = impl.backend->attempt(request);
        if (r.status != ToolStatus::ok)
            return reply_error(res, r.status == ToolStatus::retryable_error ? 503 : 500, r.error);

        auto masks = json::array();
        for (auto const& m: r.masks_rle)
            masks.push_back(base64_encode(m));
        res.set_content(json {{"masks", masks}}.dump(), "application/json");
    });
}

SegmentServer::~SegmentServer()
{
    stop();
}

int SegmentServer::start()
{
    if (impl_->thread.joinable())
        return impl_->port;
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0)
        throw Error(ErrorCode::ToolFailure, "could not bind a local port");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

void SegmentServer::stop()
{
    if (!impl_->thread.joinable())
        return;
    impl_->server.stop();
    impl_->thread.join();
}

std::string SegmentServer::base_url() const
{
    return fmt::format("http://127.0.0.1:{}", impl_->port);
}

} // namespace fscs

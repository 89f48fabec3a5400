// SPDX-License-Identifier: Apache-2.0
#include "fscs/hashing.hpp"
#include "fscs/image_io.hpp"
#include "fscs/mask_codec.hpp"
#include "fscs/oracle.hpp"
#include "fscs/toolkit.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

namespace fscs
{
namespace
{

using nlohmann::json;

/// Replays the shared segment protocol fixtures against `base_url`; returns one line per failed check.
std::vector<std::string> contract_check(const std::string& base_url)
{
    auto const suite = json::parse(read_file(std::filesystem::path(FSCS_FIXTURE_DIR) / "protocol" / "segment_fixtures.json"));
    auto failures = std::vector<std::string> {};
    httplib::Client client(base_url);
    client.set_read_timeout(std::chrono::seconds(10));
    for (auto const& c: suite.at("cases"))
    {
        auto const name = c.at("name").get<std::string>();
        auto const body = c.contains("raw_body") ? c.at("raw_body").get<std::string>() : c.at("body").dump();
        auto const res = client.Post(suite.at("endpoint").get<std::string>(), body, "application/json");
        if (!res)
        {
            failures.push_back(name + ": transport error");
            continue;
        }
        auto const& expect = c.at("expect");
        if (res->status != expect.at("status").get<int>())
        {
            failures.push_back(fmt::format("{}: status {}", name, res->status));
            continue;
        }
        if (res->status != 200)
            continue;
        auto const reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("masks") || !reply.at("masks").is_array())
        {
            failures.push_back(name + ": body is not {masks:[...]}");
            continue;
        }
        if (reply.at("masks").size() != expect.at("mask_count").get<std::size_t>())
        {
            failures.push_back(name + ": mask count");
            continue;
        }
        for (auto const& m: reply.at("masks"))
        {
            try
            {
                auto const mask = decode_mask(base64_decode(m.get<std::string>()), MaskFormat::rle);
                if (mask.width() != expect.at("width").get<int>() || mask.height() != expect.at("height").get<int>())
                    failures.push_back(name + ": mask dimensions");
            }
            catch (const std::exception& e)
            {
                failures.push_back(name + ": undecodable mask: " + e.what());
            }
        }
    }
    return failures;
}

/// Minimal httplib server on an ephemeral port for scripted replies.
class StubServer
{
public:
    template <typename Setup>
    explicit StubServer(Setup&& setup)
    {
        setup(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer()
    {
        server_.stop();
        thread_.join();
    }

    [[nodiscard]] std::string url() const { return fmt::format("http://127.0.0.1:{}", port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

RetryPolicy fast_retry()
{
    auto p = RetryPolicy {};
    p.base_delay = std::chrono::milliseconds(1);
    p.max_delay = std::chrono::milliseconds(2);
    p.jitter = 0;
    return p;
}

ToolRequest chat(std::string text, int retries = 2)
{
    auto r = ToolRequest {};
    r.tool = ToolKind::chat;
    r.payload = VisionQuery {std::move(text), {}};
    r.budget.max_retries = retries;
    r.budget.timeout_ms = 5000;
    return r;
}

TEST(SegmentServerTest, OracleStubPassesProtocolFixtures)
{
    auto server = SegmentServer(std::make_shared<OracleBackend>(NoiseModel {}));
    server.start();
    EXPECT_EQ(contract_check(server.base_url()), std::vector<std::string> {});

    httplib::Client client(server.base_url());
    auto const health = client.Get("/healthz");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(json::parse(health->body).at("status"), "ready");
}

TEST(SegmentServerTest, ContractCheckFlagsWrongDimensions)
{
    auto const stub = StubServer([](httplib::Server& s) {
        s.Post("/v1/segment", [](const httplib::Request& req, httplib::Response& res) {
            auto const body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("boxes"))
                return void(res.status = 400);
            auto masks = json::array();
            for (std::size_t i = 0; i < body.at("boxes").size(); ++i)
                masks.push_back(base64_encode(encode_mask(BinaryMask(3, 3), MaskFormat::rle)));
            res.set_content(json {{"masks", masks}}.dump(), "application/json");
        });
    });
    auto const failures = contract_check(stub.url());
    EXPECT_FALSE(failures.empty());
    auto dims = 0;
    for (auto const& f: failures)
        dims += f.find("mask dimensions") != std::string::npos;
    EXPECT_GE(dims, 3);
}

TEST(SegmentServerTest, HttpBackendRoundTripsBoxMasks)
{
    auto server = SegmentServer(std::make_shared<OracleBackend>(NoiseModel {}));
    server.start();
    auto backend = HttpBackend(HttpEndpoint {server.base_url(), "", "", 0});
    auto req = ToolRequest {};
    req.tool = ToolKind::segment;
    req.payload = SegmentQuery {encode_png(Image(10, 8)), {BBox {1, 2, 4, 6}, BBox {5, 0, 10, 8}}};
    auto const r = call(backend, req, fast_retry());
    ASSERT_EQ(r.status, ToolStatus::ok) << r.error;
    ASSERT_EQ(r.masks_rle.size(), 2u);
    auto const first = decode_mask(r.masks_rle[0], MaskFormat::rle);
    EXPECT_EQ(first.count(), 12);
    EXPECT_EQ(tight_bbox(first), (BBox {1, 2, 4, 6}));
    EXPECT_EQ(decode_mask(r.masks_rle[1], MaskFormat::rle).count(), 40);
}

TEST(SegmentServerTest, BackendFailuresMapToServerErrors)
{
    struct Failing final : ToolBackend
    {
        ToolStatus status;
        explicit Failing(ToolStatus s): status(s) {}
        ToolResponse attempt(const ToolRequest&) override
        {
            auto r = ToolResponse {};
            r.status = status;
            r.error = "down";
            return r;
        }
    };
    for (auto [status, http]: {std::pair {ToolStatus::retryable_error, 503}, std::pair {ToolStatus::fatal_error, 500}})
    {
        auto server = SegmentServer(std::make_shared<Failing>(status));
        server.start();
        httplib::Client client(server.base_url());
        auto const body = HttpBackend::segment_body(SegmentQuery {encode_png(Image(4, 4)), {BBox {0, 0, 2, 2}}});
        auto const res = client.Post("/v1/segment", body.dump(), "application/json");
        ASSERT_TRUE(res);
        EXPECT_EQ(res->status, http);
    }
}

TEST(CompleteProtocolTest, BodyShape)
{
    auto const body = HttpBackend::complete_body(VisionQuery {"hello", {{"query", "PNG"}}}, "m1");
    EXPECT_EQ(body, json::parse(R"({"messages": [{"role": "user", "parts": [
        {"kind": "text", "data": "hello"}, {"kind": "image_png_base64", "data": "UE5H"}]}], "model": "m1"})"));
    EXPECT_FALSE(HttpBackend::complete_body(VisionQuery {"x", {}}).contains("model"));
}

TEST(CompleteProtocolTest, BearerTokenFromEnvironment)
{
    auto seen = std::make_shared<std::string>();
    auto const stub = StubServer([seen](httplib::Server& s) {
        s.Post("/v1/complete", [seen](const httplib::Request& req, httplib::Response& res) {
            *seen = req.get_header_value("Authorization");
            auto const body = json::parse(req.body);
            res.set_content(json {{"text", "echo " + body["messages"][0]["parts"][0]["data"].get<std::string>()}}.dump(),
                            "application/json");
        });
    });
    ::setenv("FSCS_TEST_TOKEN", "s3cret", 1);
    auto backend = HttpBackend(HttpEndpoint {stub.url(), "FSCS_TEST_TOKEN", "", 0});
    auto const r = call(backend, chat("ping"), fast_retry());
    ASSERT_EQ(r.status, ToolStatus::ok) << r.error;
    EXPECT_EQ(r.text, "echo ping");
    EXPECT_EQ(*seen, "Bearer s3cret");
    EXPECT_EQ(r.http_status, 200);

    ::unsetenv("FSCS_TEST_TOKEN");
    auto const missing = call(backend, chat("ping"), fast_retry());
    EXPECT_EQ(missing.status, ToolStatus::fatal_error);
    EXPECT_EQ(missing.error_code, ErrorCode::AuthError);
    EXPECT_EQ(missing.attempt_count, 1);
}

TEST(CompleteProtocolTest, UnauthorizedIsFatalAuthError)
{
    auto hits = std::make_shared<std::atomic<int>>(0);
    auto const stub = StubServer([hits](httplib::Server& s) {
        s.Post("/v1/complete", [hits](const httplib::Request&, httplib::Response& res) {
            ++*hits;
            res.status = 401;
            res.set_content(R"({"error":"bad key"})", "application/json");
        });
    });
    auto backend = HttpBackend(HttpEndpoint {stub.url(), "", "", 0});
    auto const r = call(backend, chat("x", 3), fast_retry());
    EXPECT_EQ(r.status, ToolStatus::fatal_error);
    EXPECT_EQ(r.error_code, ErrorCode::AuthError);
    EXPECT_EQ(r.http_status, 401);
    EXPECT_EQ(hits->load(), 1);
}

TEST(CompleteProtocolTest, ServerErrorsAreRetried)
{
    auto hits = std::make_shared<std::atomic<int>>(0);
    auto const stub = StubServer([hits](httplib::Server& s) {
        s.Post("/v1/complete", [hits](const httplib::Request&, httplib::Response& res) {
            auto const n = ++*hits;
            if (n == 1)
                res.status = 503;
            else if (n == 2)
                res.set_content("not json", "text/plain");
            else
                res.set_content(R"({"text":"finally"})", "application/json");
        });
    });
    auto backend = HttpBackend(HttpEndpoint {stub.url(), "", "", 0});
    auto const r = call(backend, chat("x", 3), fast_retry());
    ASSERT_EQ(r.status, ToolStatus::ok) << r.error;
    EXPECT_EQ(r.text, "finally");
    EXPECT_EQ(r.attempt_count, 3);
}

TEST(CompleteProtocolTest, UnreachableEndpointExhaustsBudget)
{
    auto port = 0;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    auto backend = HttpBackend(HttpEndpoint {fmt::format("http://127.0.0.1:{}", port), "", "", 0});
    auto const r = call(backend, chat("x", 1), fast_retry());
    EXPECT_EQ(r.status, ToolStatus::fatal_error);
    EXPECT_EQ(r.attempt_count, 2);
    EXPECT_NE(r.error.find("retry budget exhausted"), std::string::npos);
}

} // namespace
} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/class_id.hpp"
#include "fscs/error.hpp"
#include "fscs/geometry.hpp"
#include "fscs/mask.hpp"
#include "fscs/prompts.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fscs
{

struct Episode;

enum class ToolKind
{
    chat,
    vision,
    segment,
};

std::string_view to_string(ToolKind kind);

struct ImagePart
{
    std::string role_tag;
    std::string png; ///< encoded PNG bytes
};

/// Text plus ordered images. Chat requests carry no images.
struct VisionQuery
{
    std::string text;
    std::vector<ImagePart> images;
};

struct SegmentQuery
{
    std::string image_png;
    std::vector<BBox> boxes;
};

struct Budget
{
    int timeout_ms = 60000;
    int max_retries = 2;
};

/// In-process metadata that never crosses the wire. Oracle backends read ground truth
/// through it; live backends ignore it.
struct RequestContext
{
    const Episode* episode = nullptr;
    Stage stage = Stage::plan;
    std::optional<ClassId> class_id;
    int iteration = 0;
    std::optional<BBox> current_box; ///< box under review (judge) or being refined (quest)
    const BinaryMask* mask = nullptr; ///< mask under review (judge)
    std::optional<EdgeAdjust> feedback;
    double feedback_gain = 0.5;
    double judge_threshold = 0.75;
};

struct ToolRequest
{
    ToolKind tool = ToolKind::chat;
    std::variant<VisionQuery, SegmentQuery> payload;
    Budget budget;
    RequestContext context;

    /// Text part of the request; for segment requests a canonical rendering of the boxes.
    [[nodiscard]] std::string prompt_text() const;
    /// SHA-256 of each image sent, in order.
    [[nodiscard]] std::vector<std::string> image_hashes() const;
    /// Stable hash of (tool, prompt text, image hashes).
    [[nodiscard]] std::string hash() const;
    [[nodiscard]] std::size_t payload_bytes() const;
};

enum class ToolStatus
{
    ok,
    retryable_error,
    fatal_error,
};

std::string_view to_string(ToolStatus status);

struct ToolResponse
{
    ToolStatus status = ToolStatus::ok;
    std::string text;                    ///< chat / vision body
    std::vector<std::string> masks_rle;  ///< segment body: raw RLE bytes, one per box
    std::string error;
    std::optional<ErrorCode> error_code; ///< set for typed fatal errors (auth, replay)
    int http_status = 0;
    double latency_ms = 0;
    int attempt_count = 0;

    /// Verbatim body as recorded in transcripts: the text, or `{"masks":[base64...]}`.
    [[nodiscard]] std::string raw_body(ToolKind kind) const;
    static ToolResponse from_raw_body(ToolKind kind, const std::string& raw);
};

/// One attempt per call; retries live in `call`.
class ToolBackend
{
public:
    virtual ~ToolBackend() = default;
    virtual ToolResponse attempt(const ToolRequest& request) = 0;
    [[nodiscard]] virtual bool is_live() const { return false; }
};

// ---------------------------------------------------------------------------
// Time

class Clock
{
public:
    virtual ~Clock() = default;
    virtual std::chrono::steady_clock::time_point now() = 0;
    virtual void sleep_for(std::chrono::milliseconds duration) = 0;
};

class SystemClock final : public Clock
{
public:
    std::chrono::steady_clock::time_point now() override { return std::chrono::steady_clock::now(); }
    void sleep_for(std::chrono::milliseconds duration) override;

    static SystemClock& instance();
};

/// Manually advanced clock that records every requested sleep.
class FakeClock final : public Clock
{
public:
    std::chrono::steady_clock::time_point now() override;
    void sleep_for(std::chrono::milliseconds duration) override;
    void advance(std::chrono::milliseconds duration);
    [[nodiscard]] std::vector<std::chrono::milliseconds> sleeps() const;

private:
    mutable std::mutex mutex_;
    std::chrono::steady_clock::time_point now_ {};
    std::vector<std::chrono::milliseconds> sleeps_;
};

// ---------------------------------------------------------------------------
// Retry

struct RetryPolicy
{
    std::chrono::milliseconds base_delay {250};
    std::chrono::milliseconds max_delay {8000};
    double jitter = 0.2; ///< delay is scaled by a uniform factor in [1 - jitter, 1 + jitter]
    std::uint64_t jitter_seed = 0;
    std::size_t max_payload_bytes = 20u << 20;

    /// Delay before retry number `retry` (0-based), jittered deterministically.
    [[nodiscard]] std::chrono::milliseconds delay_for(int retry, std::string_view request_hash) const;
};

/// Runs at most `request.budget.max_retries + 1` attempts, sleeping between retryable
/// failures. Never throws for backend failures; the final response carries the status.
ToolResponse call(ToolBackend& backend, const ToolRequest& request, const RetryPolicy& policy = {},
                  Clock& clock = SystemClock::instance());

/// HTTP status classification: 408, 429 and 5xx retryable; other 4xx fatal.
ToolStatus classify_http_status(int status);

// ---------------------------------------------------------------------------
// Rate limiting

/// Token bucket refilled continuously at `requests_per_minute`.
class RateLimiter
{
public:
    RateLimiter(double requests_per_minute, int burst, Clock& clock);

    /// Blocks (via the clock) until a token is available.
    void acquire();

private:
    void refill();

    std::mutex mutex_;
    double rate_per_ms_;
    double capacity_;
    double tokens_;
    Clock& clock_;
    std::chrono::steady_clock::time_point last_;
};

// ---------------------------------------------------------------------------
// Live HTTP backends (wire protocol: POST /v1/complete, POST /v1/segment)

struct HttpEndpoint
{
    std::string base_url; ///< e.g. http://127.0.0.1:8080
    std::string api_key_env; ///< environment variable holding a bearer token; empty for none
    std::string model;
    double requests_per_minute = 0; ///< 0 disables rate limiting
};

class HttpBackend final : public ToolBackend
{
public:
    explicit HttpBackend(HttpEndpoint endpoint, Clock& clock = SystemClock::instance());
    ~HttpBackend() override;

    ToolResponse attempt(const ToolRequest& request) override;
    [[nodiscard]] bool is_live() const override { return true; }

    /// Wire encoders, exposed for protocol tests.
    static nlohmann::json complete_body(const VisionQuery& query, std::string_view model = {});
    static nlohmann::json segment_body(const SegmentQuery& query);

private:
    HttpEndpoint endpoint_;
    std::unique_ptr<RateLimiter> limiter_;
};

/// Serves a backend's segment capability over `/v1/segment` (plus `/healthz`) on
/// localhost. Used as the oracle endpoint stub for protocol fixtures.
class SegmentServer
{
public:
    explicit SegmentServer(std::shared_ptr<ToolBackend> backend);
    ~SegmentServer();

    SegmentServer(const SegmentServer&) = delete;
    SegmentServer& operator=(const SegmentServer&) = delete;

    /// Binds an ephemeral port and starts serving; returns the port.
    int start();
    void stop();
    [[nodiscard]] std::string base_url() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace fscs

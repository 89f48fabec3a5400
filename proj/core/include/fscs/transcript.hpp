// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/class_id.hpp"
#include "fscs/episode.hpp"
#include "fscs/prediction.hpp"
#include "fscs/prompts.hpp"
#include "fscs/toolkit.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fscs
{

/// One backend call.
struct StepRecord
{
    int ordinal = 0;
    Stage stage = Stage::plan;
    ToolKind tool = ToolKind::chat;
    std::optional<ClassId> class_id;
    int iteration = 0;
    std::string request_hash;
    std::string prompt_text;
    std::vector<std::string> image_refs; ///< content hashes of the images sent
    std::string raw_response;
    nlohmann::json parsed_summary;
    ToolStatus status = ToolStatus::ok;
    int attempt_count = 0;
    double latency_ms = 0;
    std::string outcome;

    bool operator==(const StepRecord&) const = default;
};

struct Transcript
{
    std::string episode_id;
    nlohmann::json config;
    std::string dataset_fingerprint;
    std::optional<EpisodeDescriptor> episode;
    std::vector<StepRecord> steps;
    Prediction prediction;

    bool operator==(const Transcript&) const = default;
};

nlohmann::json to_json(const StepRecord& step);
StepRecord step_from_json(const nlohmann::json& j);

/// JSON lines: header, one line per step, footer with the prediction.
std::string serialize_transcript(const Transcript& transcript);
Transcript parse_transcript(std::string_view text);

void write_transcript(const std::filesystem::path& path, const Transcript& transcript);
Transcript read_transcript(const std::filesystem::path& path);
/// Reads every `*.transcript.jsonl` in a directory, sorted by file name.
std::vector<Transcript> read_transcript_dir(const std::filesystem::path& dir);
std::string transcript_file_name(std::string_view episode_id);

/// Same transcript with every latency zeroed, for comparisons across runs.
Transcript without_latency(Transcript transcript);

/// Serves recorded responses in order, per episode. Extra calls fail with
/// TranscriptExhausted, altered requests with RequestMismatch.
class ReplayBackend final : public ToolBackend
{
public:
    explicit ReplayBackend(std::vector<Transcript> transcripts);

    ToolResponse attempt(const ToolRequest& request) override;

    /// Number of recorded responses not yet served.
    [[nodiscard]] std::size_t remaining(std::string_view episode_id) const;

private:
    struct Cursor
    {
        std::vector<StepRecord> steps;
        std::size_t next = 0;
    };

    mutable std::mutex mutex_;
    std::map<std::string, Cursor, std::less<>> cursors_;
};

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/class_id.hpp"
#include "fscs/dataset.hpp"
#include "fscs/geometry.hpp"
#include "fscs/mask.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fscs
{

struct EpisodeSpec
{
    int n_way = 1;
    int k_shot = 1;
    int fold = 0;
    std::uint64_t seed = 0;
    int count = 1;

    bool operator==(const EpisodeSpec&) const = default;
};

void validate(const EpisodeSpec& spec, int classes_per_fold);

struct SupportExample
{
    std::string image_id;
    std::filesystem::path image_ref;
    ClassId class_id;
    BinaryMask mask;
    BBox bbox;

    bool operator==(const SupportExample&) const = default;
};

struct SupportGroup
{
    ClassId class_id;
    std::string class_name;
    std::vector<SupportExample> examples;

    bool operator==(const SupportGroup&) const = default;
};

/// One N-way K-shot task with its held-out query ground truth.
struct Episode
{
    std::string episode_id;
    EpisodeSpec spec;
    int ordinal = 0;
    std::vector<SupportGroup> support; ///< ascending class id
    std::string query_image_id;
    std::filesystem::path query_image_ref;
    std::map<ClassId, bool> gt_presence;
    std::map<ClassId, BinaryMask> gt_masks; ///< all-false where absent

    [[nodiscard]] std::vector<ClassId> class_ids() const;
    [[nodiscard]] const SupportGroup& group(ClassId id) const;

    bool operator==(const Episode&) const = default;
};

/// Ids and references only; no pixel data. One line of the episode list file.
struct EpisodeDescriptor
{
    struct Group
    {
        ClassId class_id;
        std::vector<std::string> image_ids;
        bool operator==(const Group&) const = default;
    };

    std::string episode_id;
    EpisodeSpec spec;
    int ordinal = 0;
    std::vector<Group> support;
    std::string query_image_id;
    std::map<ClassId, bool> gt_presence;

    bool operator==(const EpisodeDescriptor&) const = default;
};

/// Deterministic in (index contents, spec).
std::vector<Episode> sample_episodes(const DatasetIndex& index, const EpisodeSpec& spec);

/// Lowercase hex of a stable hash over (seed, ordinal, query id, sorted support ids).
std::string make_episode_id(std::uint64_t seed, int ordinal, std::string_view query_image_id,
                            std::vector<std::string> support_image_ids);

EpisodeDescriptor describe(const Episode& episode);
/// Reloads masks from the dataset. Throws UnknownEpisode for ids missing from the index.
Episode materialize(const DatasetIndex& index, const EpisodeDescriptor& descriptor);

nlohmann::json to_json(const EpisodeDescriptor& descriptor);
EpisodeDescriptor descriptor_from_json(const nlohmann::json& j);

void write_episode_list(const std::filesystem::path& path, std::span<const EpisodeDescriptor> episodes);
std::vector<EpisodeDescriptor> read_episode_list(const std::filesystem::path& path);

} // namespace fscs

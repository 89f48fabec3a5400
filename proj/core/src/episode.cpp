// SPDX-License-Identifier: Apache-2.0
#include "fscs/episode.hpp"

#include "fscs/error.hpp"
#include "fscs/hashing.hpp"
#include "fscs/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>

namespace fscs
{

using nlohmann::json;

void validate(const EpisodeSpec& spec, int classes_per_fold)
{
    if (spec.n_way < 1 || spec.k_shot < 1 || spec.count < 1)
        throw Error(ErrorCode::InvalidEpisodeSpec, "n_way, k_shot and count must be >= 1");
    if (spec.fold < 0)
        throw Error(ErrorCode::InvalidEpisodeSpec, "fold must be >= 0");
    if (spec.n_way > classes_per_fold)
        throw Error(ErrorCode::InvalidEpisodeSpec,
                    fmt::format("n_way {} exceeds the {} classes of a fold", spec.n_way, classes_per_fold));
}

std::vector<ClassId> Episode::class_ids() const
{
    std::vector<ClassId> ids;
    for (auto const& g: support)
        ids.push_back(g.class_id);
    return ids;
}

const SupportGroup& Episode::group(ClassId id) const
{
    for (auto const& g: support)
        if (g.class_id == id)
            return g;
    throw Error(ErrorCode::KeyMismatch, fmt::format("class {} is not in episode {}", id.value, episode_id));
}

std::string make_episode_id(std::uint64_t seed, int ordinal, std::string_view query_image_id,
                            std::vector<std::string> support_image_ids)
{
    std::sort(support_image_ids.begin(), support_image_ids.end());
    auto const key = fmt::format("{}|{}|{}|{}", seed, ordinal, query_image_id, fmt::join(support_image_ids, ","));
    return sha256_hex(key).substr(0, 16);
}

namespace
{

/// Picks `k` distinct elements by a partial Fisher-Yates shuffle.
template <typename T>
std::vector<T> pick(std::vector<T> pool, std::size_t k, Rng& rng)
{
    for (std::size_t i = 0; i < k; ++i)
    {
        auto const j = i + rng.index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

Episode build_episode(const DatasetIndex& index, const EpisodeSpec& spec, int ordinal, const ImageRecord& query,
                      const std::vector<std::pair<ClassId, std::vector<const ImageRecord*>>>& groups)
{
    auto episode = Episode {};
    episode.spec = spec;
    episode.ordinal = ordinal;
    episode.query_image_id = query.image_id;
    episode.query_image_ref = query.image_path;

    std::vector<std::string> support_ids;
    for (auto const& [class_id, records]: groups)
    {
        auto group = SupportGroup {class_id, index.class_name(class_id), {}};
        for (auto const* record: records)
        {
            auto mask = index.load_class_mask(*record, class_id);
            auto const box = tight_bbox(mask);
            group.examples.push_back({record->image_id, record->image_path, class_id, std::move(mask), box});
            support_ids.push_back(record->image_id);
        }
        episode.support.push_back(std::move(group));

        episode.gt_presence[class_id] = query.present_classes.contains(class_id);
        episode.gt_masks[class_id] = index.load_class_mask(query, class_id);
    }
    episode.episode_id = make_episode_id(spec.seed, ordinal, query.image_id, std::move(support_ids));
    return episode;
}

} // namespace

std::vector<Episode> sample_episodes(const DatasetIndex& index, const EpisodeSpec& spec)
{
    if (spec.fold >= index.num_folds())
        throw Error(ErrorCode::InvalidEpisodeSpec, fmt::format("fold {} out of range", spec.fold));
    auto const fold_classes = index.classes_in_fold(spec.fold);
    validate(spec, static_cast<int>(fold_classes.size()));

    std::map<ClassId, std::vector<std::size_t>> images_of;
    auto const& images = index.images();
    for (std::size_t i = 0; i < images.size(); ++i)
        for (auto const& c: images[i].present_classes)
            images_of[c].push_back(i);

    std::vector<Episode> episodes;
    episodes.reserve(std::size_t(spec.count));
    for (int ordinal = 0; ordinal < spec.count; ++ordinal)
    {
        auto rng = Rng::keyed(fmt::format("episode|{}|{}", spec.seed, ordinal));

        auto chosen = pick(fold_classes, std::size_t(spec.n_way), rng);
        std::sort(chosen.begin(), chosen.end());

        std::set<std::size_t> candidates;
        for (auto const& c: chosen)
        {
            auto const& pool = images_of[c];
            if (pool.size() < std::size_t(spec.k_shot) + 1)
                throw Error(ErrorCode::InsufficientImages,
                            fmt::format("class {} has {} images, needs {}", c.value, pool.size(), spec.k_shot + 1));
            candidates.insert(pool.begin(), pool.end());
        }
        auto const query_pos = *std::next(candidates.begin(), std::ptrdiff_t(rng.index(candidates.size())));
        auto const& query = images[query_pos];

        std::vector<std::pair<ClassId, std::vector<const ImageRecord*>>> groups;
        for (auto const& c: chosen)
        {
            std::vector<std::size_t> pool;
            for (auto i: images_of[c])
                if (i != query_pos)
                    pool.push_back(i);
            std::vector<const ImageRecord*> records;
            for (auto i: pick(pool, std::size_t(spec.k_shot), rng))
                records.push_back(&images[i]);
            groups.emplace_back(c, std::move(records));
        }
        episodes.push_back(build_episode(index, spec, ordinal, query, groups));
    }
    return episodes;
}

EpisodeDescriptor describe(const Episode& episode)
{
    auto d = EpisodeDescriptor {};
    d.episode_id = episode.episode_id;
    d.spec = episode.spec;
    d.ordinal = episode.ordinal;
    d.query_image_id = episode.query_image_id;
    d.gt_presence = episode.gt_presence;
    for (auto const& g: episode.support)
    {
        auto group = EpisodeDescriptor::Group {g.class_id, {}};
        for (auto const& ex: g.examples)
            group.image_ids.push_back(ex.image_id);
        d.support.push_back(std::move(group));
    }
    return d;
}

Episode materialize(const DatasetIndex& index, const EpisodeDescriptor& descriptor)
{
    auto const& query = index.image(descriptor.query_image_id);
    std::vector<std::pair<ClassId, std::vector<const ImageRecord*>>> groups;
    for (auto const& g: descriptor.support)
    {
        std::vector<const ImageRecord*> records;
        for (auto const& id: g.image_ids)
            records.push_back(&index.image(id));
        groups.emplace_back(g.class_id, std::move(records));
    }
    auto episode = build_episode(index, descriptor.spec, descriptor.ordinal, query, groups);
    if (episode.episode_id != descriptor.episode_id)
        throw Error(ErrorCode::UnknownEpisode, fmt::format("episode {} does not match the dataset (rebuilt as {})",
                                                           descriptor.episode_id, episode.episode_id));
    return episode;
}

json to_json(const EpisodeDescriptor& d)
{
    auto support = json::array();
    for (auto const& g: d.support)
        support.push_back({{"class_id", g.class_id.value}, {"image_ids", g.image_ids}});
    auto presence = json::object();
    for (auto const& [id, present]: d.gt_presence)
        presence[std::to_string(id.value)] = present;
    return {
        {"episode_id", d.episode_id},
        {"spec",
         {{"n_way", d.spec.n_way},
          {"k_shot", d.spec.k_shot},
          {"fold", d.spec.fold},
          {"seed", d.spec.seed},
          {"count", d.spec.count}}},
        {"ordinal", d.ordinal},
        {"query_image_id", d.query_image_id},
        {"support", std::move(support)},
        {"gt_presence", std::move(presence)},
    };
}

EpisodeDescriptor descriptor_from_json(const json& j)
{
    auto d = EpisodeDescriptor {};
    try
    {
        d.episode_id = j.at("episode_id").get<std::string>();
        auto const& s = j.at("spec");
        d.spec = {s.at("n_way").get<int>(), s.at("k_shot").get<int>(), s.at("fold").get<int>(),
                  s.at("seed").get<std::uint64_t>(), s.at("count").get<int>()};
        d.ordinal = j.at("ordinal").get<int>();
        d.query_image_id = j.at("query_image_id").get<std::string>();
        for (auto const& g: j.at("support"))
            d.support.push_back({ClassId {g.at("class_id").get<int>()}, g.at("image_ids").get<std::vector<std::string>>()});
        for (auto const& [key, value]: j.at("gt_presence").items())
            d.gt_presence[ClassId {std::stoi(key)}] = value.get<bool>();
    }
    catch (const std::exception& e)
    {
        throw Error(ErrorCode::ParseError, fmt::format("bad episode descriptor: {}", e.what()));
    }
    return d;
}

void write_episode_list(const std::filesystem::path& path, std::span<const EpisodeDescriptor> episodes)
{
    std::string out;
    for (auto const& e: episodes)
        out += to_json(e).dump() + "\n";
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw Error(ErrorCode::ImageIo, fmt::format("cannot write {}", path.string()));
    file << out;
}

std::vector<EpisodeDescriptor> read_episode_list(const std::filesystem::path& path)
{
    std::ifstream file(path);
    if (!file)
        throw Error(ErrorCode::UnknownEpisode, fmt::format("cannot read episode list {}", path.string()));
    std::vector<EpisodeDescriptor> out;
    std::string line;
    while (std::getline(file, line))
    {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try
        {
            out.push_back(descriptor_from_json(json::parse(line)));
        }
        catch (const json::exception& e)
        {
            throw Error(ErrorCode::ParseError, fmt::format("bad line in {}: {}", path.string(), e.what()));
        }
    }
    return out;
}

} // namespace fscs

// SPDX-License-Identifier: Apache-2.0
#include "fscs/dataset.hpp"

#include "fscs/error.hpp"
#include "fscs/hashing.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>

namespace fscs
{

namespace fs = std::filesystem;
using nlohmann::json;

std::map<ClassId, int> assign_folds(const std::vector<ClassInfo>& classes, int num_folds)
{
    if (num_folds < 1 || classes.empty() || classes.size() % std::size_t(num_folds) != 0)
        throw Error(ErrorCode::InvalidManifest,
                    fmt::format("{} classes cannot be split into {} equal folds", classes.size(), num_folds));

    std::vector<ClassId> ids;
    for (auto const& c: classes)
        ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());

    auto const per_fold = ids.size() / std::size_t(num_folds);
    std::map<ClassId, int> folds;
    for (std::size_t i = 0; i < ids.size(); ++i)
        folds[ids[i]] = static_cast<int>(i / per_fold);
    return folds;
}

DatasetIndex::DatasetIndex(fs::path root, std::vector<ClassInfo> classes, std::vector<ImageRecord> images,
                           int num_folds, std::string fingerprint):
    root_(std::move(root)),
    classes_(std::move(classes)),
    images_(std::move(images)),
    fold_of_class_(assign_folds(classes_, num_folds)),
    num_folds_(num_folds),
    fingerprint_(std::move(fingerprint))
{
    std::sort(classes_.begin(), classes_.end(), [](auto const& a, auto const& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < images_.size(); ++i)
        if (!image_pos_.emplace(images_[i].image_id, i).second)
            throw Error(ErrorCode::InvalidManifest, fmt::format("duplicate image id '{}'", images_[i].image_id));
}

std::vector<ClassId> DatasetIndex::classes_in_fold(int fold) const
{
    std::vector<ClassId> out;
    for (auto const& [id, f]: fold_of_class_)
        if (f == fold)
            out.push_back(id);
    return out;
}

const std::string& DatasetIndex::class_name(ClassId id) const
{
    for (auto const& c: classes_)
        if (c.id == id)
            return c.name;
    throw Error(ErrorCode::InvalidManifest, fmt::format("unknown class id {}", id.value));
}

int DatasetIndex::fold_of(ClassId id) const
{
    auto const it = fold_of_class_.find(id);
    if (it == fold_of_class_.end())
        throw Error(ErrorCode::InvalidManifest, fmt::format("unknown class id {}", id.value));
    return it->second;
}

const ImageRecord& DatasetIndex::image(std::string_view image_id) const
{
    auto const it = image_pos_.find(image_id);
    if (it == image_pos_.end())
        throw Error(ErrorCode::UnknownEpisode, fmt::format("image '{}' is not in the dataset", image_id));
    return images_[it->second];
}

BinaryMask DatasetIndex::load_class_mask(const ImageRecord& record, ClassId id) const
{
    auto const raster = decode_indexed_png(read_file(record.mask_path));
    std::vector<std::uint8_t> bits(raster.values.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = raster.values[i] == id.value ? 1 : 0;
    return BinaryMask(raster.width, raster.height, std::move(bits));
}

namespace
{

fs::path locate_image(const fs::path& dir, const std::string& id, const json& entry)
{
    if (entry.contains("file"))
        return dir / entry.at("file").get<std::string>();
    for (auto const* ext: {".png", ".jpg", ".jpeg"})
    {
        auto candidate = dir / (id + ext);
        if (fs::exists(candidate))
            return candidate;
    }
    throw Error(ErrorCode::InvalidManifest, fmt::format("no image file for '{}' in {}", id, dir.string()));
}

} // namespace

DatasetIndex load_dataset(const fs::path& root, const LayoutConfig& layout)
{
    auto const manifest_path = root / layout.manifest;
    if (!fs::is_regular_file(manifest_path))
        throw Error(ErrorCode::MissingManifest, fmt::format("{} not found", manifest_path.string()));

    auto const manifest_bytes = read_file(manifest_path);
    json manifest;
    try
    {
        manifest = json::parse(manifest_bytes);
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::InvalidManifest, e.what());
    }

    std::vector<ClassInfo> classes;
    std::map<int, std::string> class_names;
    std::vector<ImageRecord> images;
    try
    {
        for (auto const& c: manifest.at("classes"))
        {
            auto info = ClassInfo {ClassId {c.at("id").get<int>()}, c.at("name").get<std::string>()};
            if (info.id.value < 1 || info.id.value >= kVoidLabel)
                throw Error(ErrorCode::InvalidManifest, fmt::format("class id {} out of range", info.id.value));
            if (!class_names.emplace(info.id.value, info.name).second)
                throw Error(ErrorCode::InvalidManifest, fmt::format("duplicate class id {}", info.id.value));
            classes.push_back(std::move(info));
        }

        for (auto const& entry: manifest.at("images"))
        {
            auto record = ImageRecord {};
            record.image_id = entry.at("id").get<std::string>();
            record.image_path = locate_image(root / layout.images_dir, record.image_id, entry);
            record.mask_path = root / layout.masks_dir / (record.image_id + ".png");
            for (auto const& p: entry.at("present"))
            {
                auto const id = p.get<int>();
                if (!class_names.contains(id))
                    throw Error(ErrorCode::InvalidManifest,
                                fmt::format("image '{}' lists undeclared class {}", record.image_id, id));
                record.present_classes.insert(ClassId {id});
            }
            images.push_back(std::move(record));
        }
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::InvalidManifest, e.what());
    }

    for (auto& record: images)
    {
        if (!fs::is_regular_file(record.mask_path))
            throw Error(ErrorCode::InvalidManifest, fmt::format("missing mask {}", record.mask_path.string()));
        record.dims = probe_dims(record.image_path);
        auto const raster = decode_indexed_png(read_file(record.mask_path));
        if (raster.width != record.dims.width || raster.height != record.dims.height)
            throw Error(ErrorCode::MaskImageMismatch,
                        fmt::format("mask {}x{} vs image {}x{} for '{}'", raster.width, raster.height,
                                    record.dims.width, record.dims.height, record.image_id));

        std::map<int, std::int64_t> pixel_counts;
        for (auto v: raster.values)
            if (v != 0 && v != kVoidLabel)
                ++pixel_counts[v];
        for (auto const& [value, n]: pixel_counts)
            if (!class_names.contains(value))
                throw Error(ErrorCode::UnknownClassInMask,
                            fmt::format("mask of '{}' contains undeclared class value {}", record.image_id, value));
        for (auto const& id: record.present_classes)
            if (!pixel_counts.contains(id.value))
                throw Error(ErrorCode::InvalidManifest,
                            fmt::format("class {} listed present in '{}' but its mask is empty", id.value,
                                        record.image_id));
    }

    return DatasetIndex(root, std::move(classes), std::move(images), layout.num_folds, sha256_hex(manifest_bytes));
}

} // namespace fscs

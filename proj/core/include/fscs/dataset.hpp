// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fscs/class_id.hpp"
#include "fscs/image_io.hpp"
#include "fscs/mask.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fscs
{

/// On-disk layout: `<images_dir>/<id>.png|jpg`, `<masks_dir>/<id>.png` (pixel value = class id,
/// 255 = void), and a JSON manifest listing classes and per-image present classes.
struct LayoutConfig
{
    std::string images_dir = "images";
    std::string masks_dir = "masks";
    std::string manifest = "manifest.json";
    int num_folds = 4;
};

struct ClassInfo
{
    ClassId id;
    std::string name;
};

struct ImageRecord
{
    std::string image_id;
    std::filesystem::path image_path;
    std::filesystem::path mask_path;
    std::set<ClassId> present_classes;
    ImageDims dims;
};

inline constexpr std::uint8_t kVoidLabel = 255;

/// Immutable after load; safe to share between threads.
class DatasetIndex
{
public:
    DatasetIndex(std::filesystem::path root, std::vector<ClassInfo> classes, std::vector<ImageRecord> images,
                 int num_folds, std::string fingerprint);

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] const std::vector<ClassInfo>& classes() const noexcept { return classes_; }
    [[nodiscard]] const std::vector<ImageRecord>& images() const noexcept { return images_; }
    [[nodiscard]] const std::map<ClassId, int>& fold_of_class() const noexcept { return fold_of_class_; }
    [[nodiscard]] int num_folds() const noexcept { return num_folds_; }
    /// SHA-256 of the manifest bytes.
    [[nodiscard]] const std::string& fingerprint() const noexcept { return fingerprint_; }

    [[nodiscard]] std::vector<ClassId> classes_in_fold(int fold) const;
    [[nodiscard]] const std::string& class_name(ClassId id) const;
    [[nodiscard]] int fold_of(ClassId id) const;

    /// Throws UnknownEpisode when the id is not in the manifest.
    [[nodiscard]] const ImageRecord& image(std::string_view image_id) const;

    /// Decodes the annotation for `record` and selects pixels equal to `id`.
    [[nodiscard]] BinaryMask load_class_mask(const ImageRecord& record, ClassId id) const;

private:
    std::filesystem::path root_;
    std::vector<ClassInfo> classes_;
    std::vector<ImageRecord> images_;
    std::map<std::string, std::size_t, std::less<>> image_pos_;
    std::map<ClassId, int> fold_of_class_;
    int num_folds_;
    std::string fingerprint_;
};

/// Validates every mask once (dimensions, class ids, non-empty present classes).
DatasetIndex load_dataset(const std::filesystem::path& root, const LayoutConfig& layout = {});

/// Classes are split into `num_folds` contiguous blocks of equal size by ascending id.
std::map<ClassId, int> assign_folds(const std::vector<ClassInfo>& classes, int num_folds);

} // namespace fscs

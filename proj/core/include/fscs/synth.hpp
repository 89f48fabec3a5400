// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>

namespace fscs
{

/// Parameters of the procedurally generated mini-dataset used by tests, benchmarks and demos.
struct SynthParams
{
    int num_classes = 8;
    int num_images = 48;
    int width = 96;
    int height = 72;
    std::uint64_t seed = 2024;
    double second_object_prob = 0.5;
};

/// Writes images/, masks/ and manifest.json under `root`. Deterministic in `params`.
void write_synthetic_dataset(const std::filesystem::path& root, const SynthParams& params = {});

} // namespace fscs

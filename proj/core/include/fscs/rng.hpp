// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fscs
{

/// Seeded stream with portable draws. std distributions differ between standard
/// libraries, so uniform and normal variates are derived from raw engine output here.
class Rng
{
public:
    explicit Rng(std::uint64_t seed): engine_(seed) {}

    /// Seed derived from SHA-256 of the joined key parts.
    static Rng keyed(std::string_view key);

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, n). n must be > 0.
    std::size_t index(std::size_t n);
    /// Uniform in [0, 1).
    double uniform();
    /// Standard normal (Box-Muller).
    double normal();

private:
    std::mt19937_64 engine_;
};

} // namespace fscs

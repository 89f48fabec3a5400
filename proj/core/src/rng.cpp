// SPDX-License-Identifier: Apache-2.0
#include "fscs/rng.hpp"

#include "fscs/hashing.hpp"

#include <cmath>
#include <numbers>

namespace fscs
{

Rng Rng::keyed(std::string_view key)
{
    auto const hex = sha256_hex(key);
    return Rng(std::stoull(hex.substr(0, 16), nullptr, 16));
}

std::size_t Rng::index(std::size_t n)
{
    // Rejection sampling keeps the draw unbiased and independent of the standard library.
    auto const limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = 0;
    do
        v = engine_();
    while (v >= limit);
    return static_cast<std::size_t>(v % n);
}

double Rng::uniform()
{
    return double(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    auto u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    auto const u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace fscs

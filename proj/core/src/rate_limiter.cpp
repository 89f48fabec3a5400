// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"
#include "fscs/toolkit.hpp"

#include <cmath>

namespace fscs
{

RateLimiter::RateLimiter(double requests_per_minute, int burst, Clock& clock):
    rate_per_ms_(requests_per_minute / 60000.0),
    capacity_(std::max(1, burst)),
    tokens_(capacity_),
    clock_(clock),
    last_(clock.now())
{
    if (!(requests_per_minute > 0))
        throw Error(ErrorCode::ConfigError, "requests_per_minute must be positive");
}

void RateLimiter::refill()
{
    auto const now = clock_.now();
    auto const elapsed = std::chrono::duration<double, std::milli>(now - last_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_ms_);
    last_ = now;
}

void RateLimiter::acquire()
{
    // Holding the lock while waiting serializes dispatch through the limiter.
    std::lock_guard lock(mutex_);
    refill();
    while (tokens_ < 1.0)
    {
        auto const wait_ms = std::ceil((1.0 - tokens_) / rate_per_ms_);
        clock_.sleep_for(std::chrono::milliseconds(static_cast<long long>(wait_ms)));
        refill();
    }
    tokens_ -= 1.0;
}

} // namespace fscs

#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <mutex>

namespace dyad {

/// Sliding-window limiter: at most `max_requests` acquisitions within any
/// `window`. One instance is shared by every worker using a provider.
class RateLimiter {
public:
    using Clock = std::chrono::steady_clock;
    using NowFn = std::function<Clock::time_point()>;
    using SleepFn = std::function<void(Clock::duration)>;

    explicit RateLimiter(int max_requests, Clock::duration window = std::chrono::minutes(1));
    /// Injectable clock for tests.
    RateLimiter(int max_requests, Clock::duration window, NowFn now, SleepFn sleep);

    /// Blocks until a slot is free, then records the acquisition.
    void acquire();
    /// Non-blocking variant; returns false when the window is full.
    bool try_acquire();

    int max_requests() const noexcept { return max_requests_; }

private:
    void evict(Clock::time_point now);

    int max_requests_;
    Clock::duration window_;
    NowFn now_;
    SleepFn sleep_;
    std::mutex mutex_;
    std::deque<Clock::time_point> stamps_;
};

}  // namespace dyad

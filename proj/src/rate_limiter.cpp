#include "dyad/rate_limiter.hpp"

#include <stdexcept>
#include <thread>

namespace dyad {

RateLimiter::RateLimiter(int max_requests, Clock::duration window)
    : RateLimiter(max_requests, window, [] { return Clock::now(); },
                  [](Clock::duration d) { std::this_thread::sleep_for(d); }) {}

RateLimiter::RateLimiter(int max_requests, Clock::duration window, NowFn now, SleepFn sleep)
    : max_requests_(max_requests), window_(window), now_(std::move(now)), sleep_(std::move(sleep)) {
    if (max_requests_ < 1) throw std::invalid_argument("rate limit must allow at least one request");
}

void RateLimiter::evict(Clock::time_point now) {
    while (!stamps_.empty() && now - stamps_.front() >= window_) stamps_.pop_front();
}

bool RateLimiter::try_acquire() {
    std::lock_guard lock(mutex_);
    const auto now = now_();
    evict(now);
    if (static_cast<int>(stamps_.size()) >= max_requests_) return false;
    stamps_.push_back(now);
    return true;
}

void RateLimiter::acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = now_();
        evict(now);
        if (static_cast<int>(stamps_.size()) < max_requests_) {
            stamps_.push_back(now);
            return;
        }
        const auto wait = stamps_.front() + window_ - now;
        // Sleep without holding the lock so other workers can observe the window.
        lock.unlock();
        sleep_(wait);
        lock.lock();
    }
}

}  // namespace dyad

#include "doiclean/rate_limiter.hpp"

#include <thread>

namespace doiclean {

RateLimiter::RateLimiter(unsigned permits_per_second, Clock clock, Sleeper sleeper)
    : limit_(permits_per_second == 0 ? 1 : permits_per_second),
      clock_(clock ? std::move(clock) : [] { return std::chrono::steady_clock::now(); }),
      sleeper_(sleeper ? std::move(sleeper)
                       : [](std::chrono::steady_clock::duration d) {
                           std::this_thread::sleep_for(d);
                         }) {}

void RateLimiter::acquire() {
  using namespace std::chrono;
  for (;;) {
    steady_clock::duration wait{};
    {
      std::lock_guard lock(mu_);
      auto now = clock_();
      while (!grants_.empty() && now - grants_.front() >= seconds(1)) {
        grants_.pop_front();
      }
      if (grants_.size() < limit_) {
        grants_.push_back(now);
        return;
      }
      wait = grants_.front() + seconds(1) - now;
    }
    sleeper_(wait);
  }
}

}  // namespace doiclean

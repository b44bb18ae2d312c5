#ifndef DOICLEAN_RATE_LIMITER_HPP
#define DOICLEAN_RATE_LIMITER_HPP

#include <chrono>
#include <deque>
#include <functional>
#include <mutex>

namespace doiclean {

/// Sliding-window limiter shared by all workers hitting one endpoint: no
/// one-second window ever sees more than `permits_per_second` grants.
/// Clock and sleep are injectable so tests can drive simulated time.
class RateLimiter {
public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  using Sleeper = std::function<void(std::chrono::steady_clock::duration)>;

  explicit RateLimiter(unsigned permits_per_second, Clock clock = nullptr,
                       Sleeper sleeper = nullptr);

  // Blocks until a permit is available, then consumes it.
  void acquire();

private:
  unsigned limit_;
  Clock clock_;
  Sleeper sleeper_;
  std::mutex mu_;
  std::deque<std::chrono::steady_clock::time_point> grants_;
};

}  // namespace doiclean

#endif

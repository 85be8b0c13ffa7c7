#include "mvs/kernel.hpp"

#include <fmt/format.h>

namespace mvs {

EventHandle SimKernel::schedule(double fire_time, Action action) {
  if (!(fire_time >= now_)) {
    throw SchedulingError(fmt::format(
        "cannot schedule event at t={} before current time t={}", fire_time, now_));
  }
  const EventHandle handle{fire_time, next_sequence_++};
  queue_.emplace(Key{handle.fire_time, handle.sequence}, std::move(action));
  return handle;
}

bool SimKernel::cancel(const EventHandle& handle) {
  return queue_.erase(Key{handle.fire_time, handle.sequence}) > 0;
}

std::size_t SimKernel::run_until(double t_end) {
  if (t_end < now_) {
    throw SchedulingError(fmt::format("run_until({}) is before current time {}", t_end, now_));
  }
  std::size_t executed = 0;
  while (!queue_.empty()) {
    auto it = queue_.begin();
    if (it->first.first > t_end) break;
    now_ = it->first.first;
    Action action = std::move(it->second);
    queue_.erase(it);
    action();
    ++executed;
  }
  now_ = t_end;
  executed_ += executed;
  return executed;
}

std::size_t SimKernel::run_all() {
  std::size_t executed = 0;
  while (!queue_.empty()) {
    auto it = queue_.begin();
    now_ = it->first.first;
    Action action = std::move(it->second);
    queue_.erase(it);
    action();
    ++executed;
  }
  executed_ += executed;
  return executed;
}

}  // namespace mvs

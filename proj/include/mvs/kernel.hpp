#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

namespace mvs {

/// Raised when an event is scheduled before the current virtual time.
class SchedulingError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Handle returned by SimKernel::schedule; permits cancellation.
struct EventHandle {
  double fire_time = 0.0;
  std::uint64_t sequence = 0;

  friend bool operator==(const EventHandle&, const EventHandle&) = default;
};

/// Deterministic virtual-time event queue.
///
/// Events fire in (fire_time, sequence) order, where sequence is a monotone
/// insertion counter, so two events at the same instant run in the order they
/// were scheduled. An event may schedule further events at the current instant;
/// those run within the same run_until() call. Single-threaded; one kernel per
/// simulation run.
class SimKernel {
public:
  using Action = std::function<void()>;

  EventHandle schedule(double fire_time, Action action);

  /// Convenience: schedule at now() + delay.
  EventHandle schedule_in(double delay, Action action) {
    return schedule(now_ + delay, std::move(action));
  }

  /// Returns false if the event already fired or was cancelled.
  bool cancel(const EventHandle& handle);

  /// Executes every event with fire_time <= t_end, then sets now() = t_end.
  std::size_t run_until(double t_end);

  /// Runs until the queue is empty; now() ends at the last fired event.
  std::size_t run_all();

  double now() const noexcept { return now_; }
  std::size_t pending() const noexcept { return queue_.size(); }
  std::uint64_t executed_total() const noexcept { return executed_; }

private:
  using Key = std::pair<double, std::uint64_t>;

  std::map<Key, Action> queue_;
  double now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t executed_ = 0;
};

}  // namespace mvs

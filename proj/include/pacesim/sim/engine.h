#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "pacesim/sim/time.h"

namespace pacesim {

// Raised when a run violates an engine or protocol contract. A run that throws
// this is aborted; the diagnostic names the violated rule.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ComponentId = std::uint32_t;

enum class EventKind : std::uint8_t {
  kPacketArrival,
  kTimerExpiry,
  kAppWakeup,
};

struct Event {
  SimTime fireTime{};
  std::uint64_t sequence{0};
  ComponentId target{0};
  EventKind kind{EventKind::kTimerExpiry};
  std::function<void()> action;
};

// Single-threaded discrete-event engine. Events fire in (fireTime, sequence)
// order, so equal-time events run in insertion order on every platform.
class EventEngine {
 public:
  EventEngine() = default;
  EventEngine(const EventEngine&) = delete;
  EventEngine& operator=(const EventEngine&) = delete;

  SimTime now() const noexcept {
    return now_;
  }

  // Throws SimulationError if `at` lies before the current clock.
  void schedule(
      SimTime at,
      ComponentId target,
      EventKind kind,
      std::function<void()> action);

  void scheduleIn(
      SimTime delay,
      ComponentId target,
      EventKind kind,
      std::function<void()> action) {
    schedule(now_ + delay, target, kind, std::move(action));
  }

  // Dispatches every event with fireTime <= end. The clock finishes at `end`
  // when the queue drains early, otherwise at the last dispatched event.
  std::uint64_t runUntil(SimTime end);

  // Dispatches until the queue is empty or stop() is called from a handler.
  std::uint64_t run();

  void stop() noexcept {
    stopRequested_ = true;
  }

  std::uint64_t scheduledCount() const noexcept {
    return nextSequence_;
  }
  std::uint64_t dispatchedCount() const noexcept {
    return dispatched_;
  }
  std::size_t pendingCount() const noexcept {
    return queue_.size();
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.fireTime != b.fireTime) {
        return a.fireTime > b.fireTime;
      }
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimTime now_{kZeroTime};
  std::uint64_t nextSequence_{0};
  std::uint64_t dispatched_{0};
  bool stopRequested_{false};
};

} // namespace pacesim

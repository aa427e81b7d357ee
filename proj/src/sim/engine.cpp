#include "pacesim/sim/engine.h"

#include <sstream>

namespace pacesim {

void EventEngine::schedule(
    SimTime at,
    ComponentId target,
    EventKind kind,
    std::function<void()> action) {
  if (at < now_) {
    std::ostringstream msg;
    msg << "event scheduled in the past: fire_time=" << at.count()
        << "ns clock=" << now_.count() << "ns target=" << target;
    throw SimulationError(msg.str());
  }
  queue_.push(Event{at, nextSequence_++, target, kind, std::move(action)});
}

std::uint64_t EventEngine::runUntil(SimTime end) {
  std::uint64_t processed = 0;
  stopRequested_ = false;
  while (!queue_.empty() && !stopRequested_) {
    if (queue_.top().fireTime > end) {
      break;
    }
    // The handler may push new events, so move the action out before popping.
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    now_ = ev.fireTime;
    ++dispatched_;
    ++processed;
    if (ev.action) {
      ev.action();
    }
  }
  if (!stopRequested_ && (queue_.empty() || queue_.top().fireTime > end) &&
      end > now_ && end != kInfiniteTime) {
    now_ = end;
  }
  return processed;
}

std::uint64_t EventEngine::run() {
  return runUntil(kInfiniteTime);
}

} // namespace pacesim

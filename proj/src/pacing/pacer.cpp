#include "pacesim/pacing/pacer.h"

#include <algorithm>

namespace pacesim {

std::string_view toString(PacerStrategy strategy) {
  switch (strategy) {
    case PacerStrategy::kTimestamp:
      return "TIMESTAMP";
    case PacerStrategy::kInterval:
      return "INTERVAL";
    case PacerStrategy::kLeakyBucket:
      return "LEAKY_BUCKET";
    case PacerStrategy::kNone:
      return "NONE";
  }
  return "UNKNOWN";
}

std::optional<PacerStrategy> pacerStrategyFromString(std::string_view name) {
  for (auto s : {PacerStrategy::kTimestamp,
                 PacerStrategy::kInterval,
                 PacerStrategy::kLeakyBucket,
                 PacerStrategy::kNone}) {
    if (toString(s) == name) {
      return s;
    }
  }
  return std::nullopt;
}

SimTime SpacingChain::book(
    std::uint32_t bytes,
    double bytesPerSecond,
    SimTime readySince) {
  const SimTime slot = nextSlot(readySince);
  nextAllowed_ = slot + pacingInterval(bytes, bytesPerSecond);
  return slot;
}

void TimestampPacer::pace(Packet& packet, double bytesPerSecond, SimTime now) {
  packet.intendedTxTime = chain_.book(packet.size, bytesPerSecond, now);
  packet.txtimeAttached = true;
}

SimTime IntervalPacer::pace(Packet& packet, double bytesPerSecond, SimTime now) {
  const SimTime release = chain_.book(packet.size, bytesPerSecond, now);
  packet.intendedTxTime = release;
  packet.txtimeAttached = false;
  return release;
}

Pacer::Pacer(const PacerConfig& config, std::uint32_t mss)
    : config_(config),
      bucket_(static_cast<std::uint64_t>(config.bucketCapacityPackets) * mss, 1.0, kZeroTime) {}

SimTime Pacer::releaseTime(
    std::uint32_t bytes,
    double bytesPerSecond,
    SimTime readySince,
    SimTime now) {
  switch (config_.strategy) {
    case PacerStrategy::kInterval:
      return std::max(now, chain_.nextSlot(readySince));
    case PacerStrategy::kLeakyBucket: {
      bucket_.setLeakRate(bytesPerSecond, now);
      const auto decision = bucket_.peek(bytes, now);
      if (const auto* wait = std::get_if<WaitUntil>(&decision)) {
        return wait->time;
      }
      return now;
    }
    case PacerStrategy::kTimestamp:
    case PacerStrategy::kNone:
      return now;
  }
  return now;
}

PacedSend Pacer::commit(
    std::uint32_t bytes,
    double bytesPerSecond,
    SimTime readySince,
    SimTime scheduled,
    SimTime now) {
  switch (config_.strategy) {
    case PacerStrategy::kTimestamp:
      return PacedSend{chain_.book(bytes, bytesPerSecond, now), true};
    case PacerStrategy::kInterval:
      return PacedSend{chain_.book(bytes, bytesPerSecond, readySince), false};
    case PacerStrategy::kLeakyBucket:
      bucket_.setLeakRate(bytesPerSecond, now);
      bucket_.admit(bytes, now);
      return PacedSend{std::min(scheduled, now), false};
    case PacerStrategy::kNone:
      return PacedSend{now, false};
  }
  return PacedSend{now, false};
}

} // namespace pacesim

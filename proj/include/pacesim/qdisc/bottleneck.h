#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "pacesim/qdisc/nic.h"
#include "pacesim/sim/engine.h"

namespace pacesim {

struct BottleneckConfig {
  double rateBps{40e6};
  // Two BDPs at 40 Mbit/s and 40 ms: 5e6 B/s * 0.04 s * 2.
  std::uint64_t bufferBytes{400'000};
  SimTime oneWayDelayForward{20ms};
  SimTime oneWayDelayReverse{20ms};

  SimTime minRtt() const noexcept {
    return oneWayDelayForward + oneWayDelayReverse;
  }
  double bdpBytes() const noexcept {
    return rateBps / 8.0 * toSeconds(minRtt());
  }
  bool operator==(const BottleneckConfig&) const = default;
};

struct ForwardAt {
  SimTime time;
};
struct Drop {};

// Token-bucket rate limiter with a one-MTU burst and a finite byte queue,
// followed by the forward propagation delay. Overflow is tail-dropped.
class TbfBottleneck {
 public:
  using DropObserver = std::function<void(const Packet&)>;

  TbfBottleneck(
      EventEngine& engine,
      const BottleneckConfig& config,
      PacketSink onForward,
      DropObserver onDrop = {});

  // Admits `packet` at the current clock; returns when it leaves the shaper
  // (before propagation delay) or that it was dropped.
  std::variant<ForwardAt, Drop> offer(Packet packet);

  std::uint64_t drops() const noexcept {
    return drops_;
  }
  std::uint64_t occupancy() const noexcept {
    return occupancy_;
  }
  std::uint64_t maxOccupancy() const noexcept {
    return maxOccupancy_;
  }
  std::uint64_t forwardedBytes() const noexcept {
    return forwardedBytes_;
  }

 private:
  EventEngine& engine_;
  BottleneckConfig config_;
  PacketSink onForward_;
  DropObserver onDrop_;
  SimTime busyUntil_{kZeroTime};
  std::uint64_t occupancy_{0};
  std::uint64_t maxOccupancy_{0};
  std::uint64_t drops_{0};
  std::uint64_t forwardedBytes_{0};
};

// Fixed propagation delay.
class DelayLine {
 public:
  DelayLine(EventEngine& engine, SimTime delay, PacketSink onArrival)
      : engine_(engine), delay_(delay), onArrival_(std::move(onArrival)) {}

  void send(Packet packet);

 private:
  EventEngine& engine_;
  SimTime delay_;
  PacketSink onArrival_;
};

} // namespace pacesim

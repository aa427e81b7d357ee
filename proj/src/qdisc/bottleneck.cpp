#include "pacesim/qdisc/bottleneck.h"

#include <algorithm>

namespace pacesim {

TbfBottleneck::TbfBottleneck(
    EventEngine& engine,
    const BottleneckConfig& config,
    PacketSink onForward,
    DropObserver onDrop)
    : engine_(engine),
      config_(config),
      onForward_(std::move(onForward)),
      onDrop_(std::move(onDrop)) {}

std::variant<ForwardAt, Drop> TbfBottleneck::offer(Packet packet) {
  if (occupancy_ + packet.size > config_.bufferBytes) {
    ++drops_;
    if (onDrop_) {
      onDrop_(packet);
    }
    return Drop{};
  }
  const SimTime now = engine_.now();
  const SimTime start = std::max(now, busyUntil_);
  const SimTime finish = start + serializationTime(packet.size, config_.rateBps);
  busyUntil_ = finish;
  // The backlog holds a packet until the bucket has tokens to release it.
  if (start > now) {
    occupancy_ += packet.size;
    maxOccupancy_ = std::max(maxOccupancy_, occupancy_);
    engine_.schedule(start, 1, EventKind::kPacketArrival, [this, size = packet.size]() {
      occupancy_ -= size;
    });
  }
  const SimTime arrival = finish + config_.oneWayDelayForward;
  engine_.schedule(finish, 1, EventKind::kPacketArrival, [this, packet, arrival]() {
    forwardedBytes_ += packet.size;
    engine_.schedule(arrival, 1, EventKind::kPacketArrival, [this, packet]() {
      if (onForward_) {
        onForward_(packet);
      }
    });
  });
  return ForwardAt{finish};
}

void DelayLine::send(Packet packet) {
  engine_.scheduleIn(delay_, 2, EventKind::kPacketArrival, [this, packet]() {
    if (onArrival_) {
      onArrival_(packet);
    }
  });
}

} // namespace pacesim

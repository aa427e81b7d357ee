#pragma once

#include <functional>

#include "pacesim/sim/engine.h"
#include "pacesim/sim/rng.h"
#include "pacesim/transport/packet.h"

namespace pacesim {

using PacketSink = std::function<void(Packet)>;

struct NicModel {
  double lineRateBps{1e9};
  bool launchTimeEnabled{false};
  // Deviation of the NIC's launch from the requested launch time.
  JitterModel launchTimePrecisionJitter{JitterModel::normal(180us)};
  // Latency of each software (FQ) dequeue.
  JitterModel swDequeueJitter{JitterModel::normal(50us)};
  // Deviation of ETF's software-timed release from the packet's txtime.
  JitterModel etfSoftwareJitter{JitterModel::normal(180us)};

  bool operator==(const NicModel&) const = default;
};

// Serializes packets onto the wire in hand-over order. `onDeparture` sees each
// packet at the first bit on the wire (the tap); `onDelivered` gets it once the
// last bit has left.
class Nic {
 public:
  Nic(EventEngine& engine, const NicModel& model, PacketSink onDeparture, PacketSink onDelivered);

  // Queues `packet` for transmission no earlier than `notBefore`.
  void transmit(Packet packet, SimTime notBefore);

  const NicModel& model() const noexcept {
    return model_;
  }
  SimTime busyUntil() const noexcept {
    return freeAt_;
  }

 private:
  EventEngine& engine_;
  NicModel model_;
  PacketSink onDeparture_;
  PacketSink onDelivered_;
  SimTime freeAt_{kZeroTime};
};

} // namespace pacesim

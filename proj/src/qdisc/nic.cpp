#include "pacesim/qdisc/nic.h"

#include <algorithm>

namespace pacesim {

Nic::Nic(
    EventEngine& engine,
    const NicModel& model,
    PacketSink onDeparture,
    PacketSink onDelivered)
    : engine_(engine),
      model_(model),
      onDeparture_(std::move(onDeparture)),
      onDelivered_(std::move(onDelivered)) {}

void Nic::transmit(Packet packet, SimTime notBefore) {
  const SimTime departure = std::max({engine_.now(), notBefore, freeAt_});
  const SimTime done = departure + serializationTime(packet.size, model_.lineRateBps);
  freeAt_ = done;
  packet.actualTxTime = departure;
  engine_.schedule(
      departure, 0, EventKind::kPacketArrival, [this, packet, done]() mutable {
        if (onDeparture_) {
          onDeparture_(packet);
        }
        engine_.schedule(done, 0, EventKind::kPacketArrival, [this, packet]() {
          if (onDelivered_) {
            onDelivered_(packet);
          }
        });
      });
}

} // namespace pacesim

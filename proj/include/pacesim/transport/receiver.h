#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "pacesim/sim/time.h"
#include "pacesim/transport/packet.h"
#include "pacesim/transport/transfer_config.h"

namespace pacesim {

// Ordered set of disjoint half-open [begin, end) intervals.
class IntervalSet {
 public:
  // Returns the number of values newly covered.
  std::uint64_t insert(std::uint64_t begin, std::uint64_t end);
  bool contains(std::uint64_t value) const;
  // End of the interval starting at zero, or zero if none.
  std::uint64_t contiguousPrefix() const;
  std::size_t size() const noexcept {
    return intervals_.size();
  }
  const std::map<std::uint64_t, std::uint64_t>& intervals() const noexcept {
    return intervals_;
  }

 private:
  std::map<std::uint64_t, std::uint64_t> intervals_;
};

// Receiver endpoint: records arriving packet numbers and stream payload, and
// decides when to emit ACKs (every N data packets or after max_ack_delay).
class Receiver {
 public:
  explicit Receiver(const TransferConfig& config);

  // Returns an ACK to send now, if the cadence calls for one.
  std::optional<AckInfo> receiverStep(const Packet& packet, SimTime now);

  // Delayed-ACK timer expiry.
  std::optional<AckInfo> onAckTimer(SimTime now);

  // Deadline of the pending delayed ACK, if one is armed.
  std::optional<SimTime> ackDeadline() const noexcept {
    return ackDeadline_;
  }

  AckInfo buildAck(SimTime now) const;

  std::uint64_t deliveredInOrder() const noexcept {
    return deliveredInOrder_;
  }
  std::uint64_t uniquePayloadBytes() const noexcept {
    return uniquePayload_;
  }
  std::uint64_t duplicatePackets() const noexcept {
    return duplicatePackets_;
  }
  std::uint64_t dataPacketsReceived() const noexcept {
    return dataPackets_;
  }
  std::optional<SimTime> lastInOrderTime() const noexcept {
    return lastInOrderTime_;
  }
  bool complete() const noexcept {
    return deliveredInOrder_ >= config_.objectSize;
  }

 private:
  AckInfo emitAck(SimTime now);

  TransferConfig config_;
  IntervalSet packetNumbers_;
  IntervalSet payload_;
  std::optional<PacketNumber> largestReceived_;
  SimTime largestReceivedTime_{kZeroTime};
  std::uint32_t unackedSinceLastAck_{0};
  std::optional<SimTime> ackDeadline_;
  std::uint64_t deliveredInOrder_{0};
  std::uint64_t uniquePayload_{0};
  std::uint64_t duplicatePackets_{0};
  std::uint64_t dataPackets_{0};
  std::optional<SimTime> lastInOrderTime_;
};

struct GoodputRecord {
  std::uint64_t payloadBytes{0};
  SimTime firstDataSent{kZeroTime};
  SimTime lastInOrderDelivery{kZeroTime};
  bool complete{false};
};

// In-order application payload bits per second. Empty for an incomplete
// transfer or a zero-length interval.
std::optional<double> goodput(const GoodputRecord& record);

} // namespace pacesim

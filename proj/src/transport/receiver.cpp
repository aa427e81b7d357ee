#include "pacesim/transport/receiver.h"

#include <algorithm>
#include <iterator>

namespace pacesim {

std::uint64_t IntervalSet::insert(std::uint64_t begin, std::uint64_t end) {
  if (begin >= end) {
    return 0;
  }
  std::uint64_t covered = 0;
  auto it = intervals_.upper_bound(begin);
  if (it != intervals_.begin()) {
    auto prev = std::prev(it);
    if (prev->second >= begin) {
      if (prev->second >= end) {
        return 0;
      }
      covered += prev->second - prev->first;
      begin = prev->first;
      end = std::max(end, prev->second);
      it = intervals_.erase(prev);
    }
  }
  while (it != intervals_.end() && it->first <= end) {
    covered += it->second - it->first;
    end = std::max(end, it->second);
    it = intervals_.erase(it);
  }
  intervals_.emplace(begin, end);
  return (end - begin) - covered;
}

bool IntervalSet::contains(std::uint64_t value) const {
  auto it = intervals_.upper_bound(value);
  if (it == intervals_.begin()) {
    return false;
  }
  return std::prev(it)->second > value;
}

std::uint64_t IntervalSet::contiguousPrefix() const {
  if (intervals_.empty() || intervals_.begin()->first != 0) {
    return 0;
  }
  return intervals_.begin()->second;
}

Receiver::Receiver(const TransferConfig& config) : config_(config) {}

std::optional<AckInfo> Receiver::receiverStep(const Packet& packet, SimTime now) {
  ++dataPackets_;
  const bool duplicate = packetNumbers_.contains(packet.packetNumber);
  if (duplicate) {
    ++duplicatePackets_;
    // Re-acknowledge immediately so the sender learns the state.
    return emitAck(now);
  }
  packetNumbers_.insert(packet.packetNumber, packet.packetNumber + 1);
  if (!largestReceived_ || packet.packetNumber > *largestReceived_) {
    largestReceived_ = packet.packetNumber;
    largestReceivedTime_ = now;
  }
  if (packet.payload.length > 0) {
    uniquePayload_ += payload_.insert(packet.payload.offset, packet.payload.end());
    const auto prefix = std::min(payload_.contiguousPrefix(), config_.objectSize);
    if (prefix > deliveredInOrder_) {
      deliveredInOrder_ = prefix;
      lastInOrderTime_ = now;
    }
  }
  ++unackedSinceLastAck_;
  if (unackedSinceLastAck_ >= config_.ackEveryN) {
    return emitAck(now);
  }
  if (!ackDeadline_) {
    ackDeadline_ = now + config_.maxAckDelay;
  }
  return std::nullopt;
}

std::optional<AckInfo> Receiver::onAckTimer(SimTime now) {
  if (!ackDeadline_ || now < *ackDeadline_ || unackedSinceLastAck_ == 0) {
    return std::nullopt;
  }
  return emitAck(now);
}

AckInfo Receiver::buildAck(SimTime now) const {
  AckInfo ack;
  if (!largestReceived_) {
    return ack;
  }
  ack.largestAcked = *largestReceived_;
  ack.ackDelay = now - largestReceivedTime_;
  const auto& intervals = packetNumbers_.intervals();
  for (auto it = intervals.rbegin(); it != intervals.rend(); ++it) {
    if (config_.maxAckRanges != 0 && ack.ranges.size() >= config_.maxAckRanges) {
      break;
    }
    ack.ranges.push_back(AckRange{it->first, it->second - 1});
  }
  return ack;
}

AckInfo Receiver::emitAck(SimTime now) {
  unackedSinceLastAck_ = 0;
  ackDeadline_.reset();
  return buildAck(now);
}

std::optional<double> goodput(const GoodputRecord& record) {
  if (!record.complete || record.lastInOrderDelivery <= record.firstDataSent) {
    return std::nullopt;
  }
  const SimTime span = record.lastInOrderDelivery - record.firstDataSent;
  return static_cast<double>(record.payloadBytes) * 8.0 / toSeconds(span);
}

} // namespace pacesim

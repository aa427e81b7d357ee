#include "pacesim/transport/loss_detector.h"

#include <algorithm>
#include <sstream>

#include "pacesim/sim/engine.h"

namespace pacesim {

LossDetector::LossDetector(const TransferConfig& config, SimTime initialRtt)
    : config_(config), rtt_(initialRtt) {}

void LossDetector::onPacketSent(SentPacketRecord record, SimTime now) {
  if (largestSent_ && record.packetNumber != *largestSent_ + 1) {
    std::ostringstream msg;
    msg << "packet numbers must be consecutive: sent " << record.packetNumber
        << " after " << *largestSent_;
    throw SimulationError(msg.str());
  }
  if (!largestSent_) {
    basePacketNumber_ = record.packetNumber;
  }
  largestSent_ = record.packetNumber;
  if (packetsInFlight_ == 0) {
    firstSentTime_ = now;
    deliveredTime_ = now;
  }
  record.sentTime = now;
  record.delivered = delivered_;
  record.deliveredTime = deliveredTime_;
  record.firstSentTime = firstSentTime_;
  bytesInFlight_ += record.size;
  ++packetsInFlight_;
  slots_.push_back(Slot{record, SlotState::kOutstanding});
}

LossDetector::Slot* LossDetector::find(PacketNumber pn) {
  if (pn < basePacketNumber_) {
    return nullptr;
  }
  const auto index = pn - basePacketNumber_;
  if (index >= slots_.size()) {
    return nullptr;
  }
  return &slots_[index];
}

void LossDetector::retire(Slot& slot, SlotState state) {
  slot.state = state;
  bytesInFlight_ -= slot.record.size;
  --packetsInFlight_;
}

void LossDetector::trimFront() {
  while (!slots_.empty() && slots_.front().state != SlotState::kOutstanding) {
    slots_.pop_front();
    ++basePacketNumber_;
  }
}

SimTime LossDetector::lossDelay() const {
  const SimTime base = std::max(rtt_.smoothed(), rtt_.latest());
  const SimTime delay = base * config_.lossTimeNumerator /
      static_cast<std::int64_t>(config_.lossTimeDenominator);
  return std::max<SimTime>(delay, 1ms);
}

AckOutcome LossDetector::onAck(const AckInfo& ack, SimTime now) {
  if (!largestSent_ || ack.largestAcked > *largestSent_) {
    std::ostringstream msg;
    msg << "protocol violation: ACK for packet " << ack.largestAcked
        << " which was never sent";
    throw SimulationError(msg.str());
  }
  AckOutcome outcome;
  const SentPacketRecord* rateSource = nullptr;
  SentPacketRecord rateRecord;
  for (const auto& range : ack.ranges) {
    if (range.largest > ack.largestAcked || range.smallest > range.largest) {
      throw SimulationError("protocol violation: malformed ACK range");
    }
    const PacketNumber lo = std::max(range.smallest, basePacketNumber_);
    for (PacketNumber pn = range.largest + 1; pn-- > lo;) {
      Slot* slot = find(pn);
      if (slot == nullptr || slot->state != SlotState::kOutstanding) {
        continue;
      }
      retire(*slot, SlotState::kAcked);
      delivered_ += slot->record.size;
      deliveredTime_ = now;
      outcome.ackedBytes += slot->record.size;
      outcome.acked.push_back(slot->record);
      if (rateSource == nullptr ||
          slot->record.delivered > rateRecord.delivered ||
          (slot->record.delivered == rateRecord.delivered &&
           slot->record.sentTime > rateRecord.sentTime)) {
        rateRecord = slot->record;
        rateSource = &rateRecord;
      }
    }
  }
  std::sort(
      outcome.acked.begin(),
      outcome.acked.end(),
      [](const auto& a, const auto& b) {
        return a.packetNumber < b.packetNumber;
      });

  if (!outcome.acked.empty()) {
    const auto& newest = outcome.acked.back();
    outcome.largestNewlyAckedSentTime = newest.sentTime;
    if (!largestAcked_ || ack.largestAcked > *largestAcked_) {
      largestAcked_ = ack.largestAcked;
    }
    if (newest.packetNumber == ack.largestAcked) {
      outcome.rttSample = rtt_.update(now - newest.sentTime, ack.ackDelay);
    }
  }

  if (rateSource != nullptr) {
    firstSentTime_ = rateRecord.sentTime;
    const SimTime sendElapsed = rateRecord.sentTime - rateRecord.firstSentTime;
    const SimTime ackElapsed = deliveredTime_ - rateRecord.deliveredTime;
    const SimTime interval = std::max(sendElapsed, ackElapsed);
    if (interval > kZeroTime) {
      DeliveryRateSample sample;
      sample.deliveredBytes = delivered_ - rateRecord.delivered;
      sample.interval = interval;
      sample.bytesPerSecond =
          static_cast<double>(sample.deliveredBytes) / toSeconds(interval);
      sample.priorDelivered = rateRecord.delivered;
      outcome.deliveryRate = sample;
    }
  }

  outcome.lost = detectLost(now);
  trimFront();
  return outcome;
}

std::vector<SentPacketRecord> LossDetector::detectLost(SimTime now) {
  std::vector<SentPacketRecord> lost;
  lossTime_.reset();
  if (!largestAcked_) {
    return lost;
  }
  const SimTime delay = lossDelay();
  const SimTime lostSendTime = now - delay;
  for (auto& slot : slots_) {
    const auto pn = slot.record.packetNumber;
    if (pn >= *largestAcked_) {
      break;
    }
    if (slot.state != SlotState::kOutstanding) {
      continue;
    }
    if (*largestAcked_ - pn >= config_.lossPacketThreshold ||
        slot.record.sentTime <= lostSendTime) {
      retire(slot, SlotState::kLost);
      ++totalLost_;
      lost.push_back(slot.record);
    } else {
      const SimTime when = slot.record.sentTime + delay;
      if (!lossTime_ || when < *lossTime_) {
        lossTime_ = when;
      }
    }
  }
  return lost;
}

std::vector<SentPacketRecord> LossDetector::onLossTimeout(SimTime now) {
  auto lost = detectLost(now);
  trimFront();
  return lost;
}

std::optional<SentPacketRecord> LossDetector::oldestOutstanding() const {
  for (const auto& slot : slots_) {
    if (slot.state == SlotState::kOutstanding) {
      return slot.record;
    }
  }
  return std::nullopt;
}

} // namespace pacesim

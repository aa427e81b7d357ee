#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "pacesim/sim/time.h"
#include "pacesim/transport/packet.h"
#include "pacesim/transport/rtt_estimator.h"
#include "pacesim/transport/transfer_config.h"

namespace pacesim {

struct SentPacketRecord {
  PacketNumber packetNumber{0};
  std::uint32_t size{0};
  SimTime sentTime{kZeroTime};
  StreamRange payload;
  bool isRetransmission{false};
  // Delivery-rate sampling state captured at send time.
  std::uint64_t delivered{0};
  SimTime deliveredTime{kZeroTime};
  SimTime firstSentTime{kZeroTime};
};

struct DeliveryRateSample {
  double bytesPerSecond{0.0};
  std::uint64_t deliveredBytes{0};
  SimTime interval{kZeroTime};
  // Connection delivered count when the sampled packet was sent; used to
  // delimit rounds.
  std::uint64_t priorDelivered{0};
};

struct AckOutcome {
  std::uint64_t ackedBytes{0};
  std::vector<SentPacketRecord> acked;
  std::vector<SentPacketRecord> lost;
  std::optional<SimTime> rttSample;
  std::optional<DeliveryRateSample> deliveryRate;
  // Send time of the newest packet acked by this ACK, if any was new.
  std::optional<SimTime> largestNewlyAckedSentTime;
};

// Sender-side bookkeeping for outstanding packets: ack processing, packet- and
// time-threshold loss detection, RTT and delivery-rate sampling.
class LossDetector {
 public:
  explicit LossDetector(const TransferConfig& config, SimTime initialRtt);

  void onPacketSent(SentPacketRecord record, SimTime now);

  // Throws SimulationError when the ACK names a packet number never sent.
  AckOutcome onAck(const AckInfo& ack, SimTime now);

  // Declares packets whose time threshold expired at `now`.
  std::vector<SentPacketRecord> onLossTimeout(SimTime now);

  // Earliest time a pending packet crosses the time threshold.
  std::optional<SimTime> lossTime() const noexcept {
    return lossTime_;
  }

  SimTime lossDelay() const;

  const RttEstimator& rtt() const noexcept {
    return rtt_;
  }
  std::uint64_t bytesInFlight() const noexcept {
    return bytesInFlight_;
  }
  std::uint64_t packetsInFlight() const noexcept {
    return packetsInFlight_;
  }
  std::uint64_t totalLost() const noexcept {
    return totalLost_;
  }
  std::uint64_t delivered() const noexcept {
    return delivered_;
  }
  std::optional<PacketNumber> largestAcked() const noexcept {
    return largestAcked_;
  }
  std::optional<SentPacketRecord> oldestOutstanding() const;

 private:
  enum class SlotState : std::uint8_t { kOutstanding, kAcked, kLost };
  struct Slot {
    SentPacketRecord record;
    SlotState state{SlotState::kOutstanding};
  };

  Slot* find(PacketNumber pn);
  void retire(Slot& slot, SlotState state);
  void trimFront();
  std::vector<SentPacketRecord> detectLost(SimTime now);

  TransferConfig config_;
  RttEstimator rtt_;
  std::deque<Slot> slots_;
  PacketNumber basePacketNumber_{0};
  std::optional<PacketNumber> largestSent_;
  std::optional<PacketNumber> largestAcked_;
  std::optional<SimTime> lossTime_;
  std::uint64_t bytesInFlight_{0};
  std::uint64_t packetsInFlight_{0};
  std::uint64_t totalLost_{0};

  std::uint64_t delivered_{0};
  SimTime deliveredTime_{kZeroTime};
  SimTime firstSentTime_{kZeroTime};
};

} // namespace pacesim

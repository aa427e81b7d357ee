#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "pacesim/sim/time.h"
#include "pacesim/transport/loss_detector.h"
#include "pacesim/transport/packet.h"

namespace pacesim {

enum class CongestionPhase : std::uint8_t { kSlowStart, kAvoidance, kRecovery };

std::string_view toString(CongestionPhase phase);

struct CongestionState {
  std::uint64_t cwnd{0};
  std::uint64_t ssthresh{UINT64_MAX};
  CongestionPhase phase{CongestionPhase::kSlowStart};
  SimTime recoveryStart{kZeroTime};
  // Bytes per second.
  double pacingRate{0.0};
  SimTime smoothedRtt{kZeroTime};

  bool operator==(const CongestionState&) const = default;
};

// Pacing rate for window-based controllers: gain * cwnd / smoothed RTT, with
// the window floored at two MSS.
double windowPacingRate(
    std::uint64_t cwnd,
    SimTime smoothedRtt,
    double gain,
    std::uint32_t mss);

struct AckEvent {
  SimTime now{kZeroTime};
  std::uint64_t ackedBytes{0};
  PacketNumber largestAcked{0};
  SimTime largestAckedSentTime{kZeroTime};
  std::optional<SimTime> rttSample;
  SimTime smoothedRtt{kZeroTime};
  SimTime minRtt{kZeroTime};
  std::optional<DeliveryRateSample> deliveryRate;
  std::uint64_t bytesInFlight{0};
  // Part of bytesInFlight still queued on the sending host.
  std::uint64_t bytesInHost{0};
  std::uint64_t totalLost{0};
  std::uint64_t delivered{0};
};

struct LossEvent {
  SimTime now{kZeroTime};
  SimTime largestLostSentTime{kZeroTime};
  std::uint32_t lostCount{0};
  std::uint64_t lostBytes{0};
  // Cumulative packets declared lost, including this event.
  std::uint64_t totalLost{0};
  std::uint64_t bytesInFlight{0};
};

enum class CcaEventKind : std::uint8_t {
  kReduction,
  kRollback,
  kRecoveryExit,
  kSlowStartExit,
};

struct CcaEventRecord {
  SimTime time{kZeroTime};
  CcaEventKind kind{CcaEventKind::kReduction};
  std::uint64_t cwndBefore{0};
  std::uint64_t cwndAfter{0};
};

class CongestionController {
 public:
  virtual ~CongestionController() = default;

  virtual std::string_view name() const = 0;

  virtual void onPacketSent(
      SimTime /*now*/,
      PacketNumber /*pn*/,
      std::uint32_t /*bytes*/,
      std::uint64_t /*bytesInFlight*/) {}
  virtual void onAck(const AckEvent& ack) = 0;
  virtual void onCongestionEvent(const LossEvent& loss) = 0;

  const CongestionState& state() const noexcept {
    return state_;
  }
  std::uint64_t cwnd() const noexcept {
    return state_.cwnd;
  }
  double pacingRate() const noexcept {
    return state_.pacingRate;
  }

  const std::vector<CcaEventRecord>& events() const noexcept {
    return events_;
  }

  // Window when the sender left slow start (including conservative slow
  // start) for good, by loss or by finishing HyStart's CSS rounds.
  std::optional<CcaEventRecord> slowStartExit() const noexcept {
    return slowStartExit_;
  }
  // Time of that exit.
  std::optional<SimTime> slowStartEpochEnd() const noexcept {
    return slowStartEpochEnd_;
  }

 protected:
  void recordEvent(
      SimTime time,
      CcaEventKind kind,
      std::uint64_t before,
      std::uint64_t after) {
    events_.push_back(CcaEventRecord{time, kind, before, after});
  }
  void noteSlowStartExit(SimTime now, std::uint64_t cwnd) {
    if (!slowStartExit_) {
      slowStartExit_ = CcaEventRecord{now, CcaEventKind::kSlowStartExit, cwnd, cwnd};
    }
  }
  void noteSlowStartEpochEnd(SimTime now) {
    if (!slowStartEpochEnd_) {
      slowStartEpochEnd_ = now;
    }
  }

  CongestionState state_;
  std::vector<CcaEventRecord> events_;
  std::optional<CcaEventRecord> slowStartExit_;
  std::optional<SimTime> slowStartEpochEnd_;
};

} // namespace pacesim

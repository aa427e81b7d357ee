#pragma once

#include <optional>

#include "pacesim/cca/congestion_controller.h"
#include "pacesim/cca/hystart.h"

namespace pacesim {

struct WindowControllerConfig {
  std::uint32_t mss{1500};
  std::uint32_t initialWindowPackets{10};
  double pacingGain{1.25};
  HystartConfig hystart;
  SimTime initialRtt{40ms};
};

// Shared slow start, HyStart++, recovery-period and pacing logic for the
// loss-based controllers. Subclasses supply avoidance growth and reduction.
class WindowController : public CongestionController {
 public:
  explicit WindowController(const WindowControllerConfig& config);

  void onPacketSent(
      SimTime now,
      PacketNumber pn,
      std::uint32_t bytes,
      std::uint64_t bytesInFlight) override;
  void onAck(const AckEvent& ack) override;
  void onCongestionEvent(const LossEvent& loss) override;

  const Hystart& hystart() const noexcept {
    return hystart_;
  }

 protected:
  virtual void growInAvoidance(const AckEvent& ack) = 0;
  virtual void reduce(const LossEvent& loss) = 0;
  // Called for the first ACK of a packet sent after the recovery period began.
  // Returns true if the controller consumed the ACK (no further growth).
  virtual bool onRecoveryEnd(const AckEvent& ack);
  virtual void onEnterAvoidance(SimTime /*now*/) {}

  void updatePacingRate();
  std::uint64_t minWindow() const noexcept {
    return 2ULL * config_.mss;
  }
  bool inRecovery(SimTime sentTime) const noexcept {
    return state_.phase == CongestionPhase::kRecovery &&
        sentTime <= state_.recoveryStart;
  }

  WindowControllerConfig config_;
  Hystart hystart_;

 private:
  void trackRound(const AckEvent& ack);
  void slowStart(const AckEvent& ack);
  void enterAvoidance(SimTime now);

  PacketNumber largestSent_{0};
  PacketNumber roundEnd_{0};
  bool roundEndedThisAck_{false};
};

class NewReno final : public WindowController {
 public:
  explicit NewReno(const WindowControllerConfig& config);
  std::string_view name() const override {
    return "reno";
  }

 protected:
  void growInAvoidance(const AckEvent& ack) override;
  void reduce(const LossEvent& loss) override;

 private:
  std::uint64_t ackedAccumulator_{0};
};

struct CubicConfig {
  WindowControllerConfig window;
  double cubicC{0.4};
  double beta{0.7};
  bool rollbackEnabled{false};
  std::uint32_t spuriousThreshold{3};
};

struct CubicCheckpoint {
  CongestionState congestion;
  double wMax{0.0};
  double k{0.0};
  SimTime epochStart{kZeroTime};
};

struct CubicState {
  // Window at the last reduction, in bytes.
  double wMax{0.0};
  // Seconds until the cubic curve returns to wMax.
  double k{0.0};
  SimTime epochStart{kZeroTime};
  bool epochActive{false};
  double cubicC{0.4};
  double beta{0.7};
  std::optional<CubicCheckpoint> checkpoint;
  std::uint64_t lostAtCheckpoint{0};
  std::uint32_t spuriousThreshold{3};
  bool rollbackEnabled{false};
};

// K = cbrt(wMax * (1 - beta) / C) with wMax expressed in segments.
double cubicK(double wMaxSegments, double beta, double cubicC);

// W_cubic(t) in segments.
double cubicWindow(double tSeconds, double k, double wMaxSegments, double cubicC);

class Cubic final : public WindowController {
 public:
  explicit Cubic(const CubicConfig& config);
  std::string_view name() const override {
    return "cubic";
  }

  const CubicState& cubicState() const noexcept {
    return cubic_;
  }
  std::uint64_t rollbackCount() const noexcept {
    return rollbacks_;
  }

 protected:
  void growInAvoidance(const AckEvent& ack) override;
  void reduce(const LossEvent& loss) override;
  bool onRecoveryEnd(const AckEvent& ack) override;
  void onEnterAvoidance(SimTime now) override;

 private:
  CubicState cubic_;
  double cwndIncrement_{0.0};
  std::uint64_t rollbacks_{0};
  std::optional<SimTime> growthHoldUntil_;
};

} // namespace pacesim

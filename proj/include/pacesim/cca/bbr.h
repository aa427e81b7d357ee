#pragma once

#include <array>
#include <cstdint>
#include <deque>

#include "pacesim/cca/congestion_controller.h"

namespace pacesim {

struct BbrConfig {
  std::uint32_t mss{1500};
  std::uint32_t initialWindowPackets{10};
  SimTime initialRtt{40ms};
  double startupGain{2.77};
  double cwndGain{2.0};
  std::uint32_t bandwidthWindowRounds{10};
  SimTime minRttWindow{10s};
  double fullBandwidthGrowth{1.25};
  std::uint32_t fullBandwidthRounds{3};
  std::uint32_t minWindowPackets{4};
};

enum class BbrMode : std::uint8_t { kStartup, kDrain, kProbeBw };

inline constexpr std::array<double, 8> kProbeBwGainCycle{
    1.25, 0.75, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

// Max over the most recent `window` rounds.
class WindowedMaxFilter {
 public:
  explicit WindowedMaxFilter(std::uint64_t window) : window_(window) {}
  void update(double value, std::uint64_t round);
  double best() const noexcept {
    return samples_.empty() ? 0.0 : samples_.front().value;
  }

 private:
  struct Sample {
    double value;
    std::uint64_t round;
  };
  std::uint64_t window_;
  std::deque<Sample> samples_;
};

struct BbrState {
  double btlBw{0.0};
  SimTime minRtt{kInfiniteTime};
  SimTime minRttStamp{kZeroTime};
  BbrMode mode{BbrMode::kStartup};
  double pacingGain{2.77};
  std::size_t gainCycleIndex{0};
  SimTime cycleStamp{kZeroTime};
  std::uint64_t roundCount{0};
  double fullBandwidth{0.0};
  std::uint32_t fullBandwidthCount{0};
};

// Reduced BBRv1: windowed-max bandwidth and windowed-min RTT filters, the
// STARTUP / DRAIN / PROBE_BW state machine and a gain-scaled pacing rate.
// Losses do not shrink the window.
class Bbr final : public CongestionController {
 public:
  explicit Bbr(const BbrConfig& config);

  std::string_view name() const override {
    return "bbr";
  }

  void onAck(const AckEvent& ack) override;
  void onCongestionEvent(const LossEvent& loss) override;

  const BbrState& bbrState() const noexcept {
    return bbr_;
  }
  double bdp() const noexcept;

 private:
  void updateRound(const AckEvent& ack);
  void checkFullPipe();
  void updateCycle(const AckEvent& ack);
  void updateWindowAndRate(const AckEvent& ack);
  void enterProbeBw(SimTime now);

  BbrConfig config_;
  BbrState bbr_;
  WindowedMaxFilter bandwidthFilter_;
  std::uint64_t nextRoundDelivered_{0};
  bool roundStart_{false};
};

} // namespace pacesim

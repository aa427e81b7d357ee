#pragma once

#include <cstdint>

#include "pacesim/sim/time.h"

namespace pacesim {

// HyStart++ constants (RFC 9406 defaults).
struct HystartConfig {
  bool enabled{true};
  SimTime minRttThresh{4ms};
  SimTime maxRttThresh{16ms};
  std::uint32_t minRttDivisor{8};
  std::uint32_t rttSamplesPerRound{8};
  std::uint32_t cssGrowthDivisor{4};
  std::uint32_t cssRounds{5};

  bool operator==(const HystartConfig&) const = default;
};

struct HystartState {
  bool enabled{true};
  std::uint32_t rttSampleCount{0};
  SimTime currentRoundMinRtt{kInfiniteTime};
  SimTime lastRoundMinRtt{kInfiniteTime};
  // Zero outside conservative slow start.
  std::uint32_t cssRoundsRemaining{0};
  SimTime cssBaselineMinRtt{kInfiniteTime};
};

enum class HystartDecision : std::uint8_t { kStay, kExitToCss };

// Delay-increase test: exit once the current round's minimum RTT exceeds the
// previous round's by clamp(last / 8, 4 ms, 16 ms), given enough samples.
HystartDecision hystartOnRoundEnd(
    const HystartState& state,
    const HystartConfig& config = {});

SimTime hystartRttThreshold(SimTime lastRoundMinRtt, const HystartConfig& config);

// Round and sample bookkeeping around the decision function.
class Hystart {
 public:
  explicit Hystart(const HystartConfig& config);

  void startRound();
  void onRttSample(SimTime rtt);

  // Call per ACK in slow start. Returns true when slow start should hand over
  // to conservative slow start.
  bool shouldEnterCss();
  // Call per ACK in conservative slow start. Returns true when the RTT fell
  // back below the baseline and regular slow start resumes.
  bool shouldResumeSlowStart();
  // Call at each round end in CSS. Returns true once all CSS rounds are used.
  bool cssRoundEnded();

  bool inCss() const noexcept {
    return state_.cssRoundsRemaining > 0;
  }
  const HystartState& state() const noexcept {
    return state_;
  }
  const HystartConfig& config() const noexcept {
    return config_;
  }

 private:
  HystartConfig config_;
  HystartState state_;
};

} // namespace pacesim

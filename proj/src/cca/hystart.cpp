#include "pacesim/cca/hystart.h"

#include <algorithm>

namespace pacesim {

SimTime hystartRttThreshold(SimTime lastRoundMinRtt, const HystartConfig& config) {
  return std::clamp(
      lastRoundMinRtt / static_cast<std::int64_t>(config.minRttDivisor),
      config.minRttThresh,
      config.maxRttThresh);
}

HystartDecision hystartOnRoundEnd(
    const HystartState& state,
    const HystartConfig& config) {
  if (!state.enabled || state.rttSampleCount < config.rttSamplesPerRound ||
      state.currentRoundMinRtt == kInfiniteTime ||
      state.lastRoundMinRtt == kInfiniteTime) {
    return HystartDecision::kStay;
  }
  const SimTime threshold = hystartRttThreshold(state.lastRoundMinRtt, config);
  if (state.currentRoundMinRtt >= state.lastRoundMinRtt + threshold) {
    return HystartDecision::kExitToCss;
  }
  return HystartDecision::kStay;
}

Hystart::Hystart(const HystartConfig& config) : config_(config) {
  state_.enabled = config.enabled;
}

void Hystart::startRound() {
  state_.lastRoundMinRtt = state_.currentRoundMinRtt;
  state_.currentRoundMinRtt = kInfiniteTime;
  state_.rttSampleCount = 0;
}

void Hystart::onRttSample(SimTime rtt) {
  state_.currentRoundMinRtt = std::min(state_.currentRoundMinRtt, rtt);
  ++state_.rttSampleCount;
}

bool Hystart::shouldEnterCss() {
  if (inCss() || hystartOnRoundEnd(state_, config_) != HystartDecision::kExitToCss) {
    return false;
  }
  state_.cssBaselineMinRtt = state_.currentRoundMinRtt;
  state_.cssRoundsRemaining = config_.cssRounds;
  return true;
}

bool Hystart::shouldResumeSlowStart() {
  if (!inCss() || state_.rttSampleCount < config_.rttSamplesPerRound) {
    return false;
  }
  if (state_.currentRoundMinRtt < state_.cssBaselineMinRtt) {
    state_.cssBaselineMinRtt = kInfiniteTime;
    state_.cssRoundsRemaining = 0;
    return true;
  }
  return false;
}

bool Hystart::cssRoundEnded() {
  if (!inCss()) {
    return false;
  }
  --state_.cssRoundsRemaining;
  return state_.cssRoundsRemaining == 0;
}

} // namespace pacesim

#include "pacesim/cca/window_controller.h"

#include <algorithm>
#include <cmath>

namespace pacesim {

std::string_view toString(CongestionPhase phase) {
  switch (phase) {
    case CongestionPhase::kSlowStart:
      return "SLOW_START";
    case CongestionPhase::kAvoidance:
      return "AVOIDANCE";
    case CongestionPhase::kRecovery:
      return "RECOVERY";
  }
  return "UNKNOWN";
}

double windowPacingRate(
    std::uint64_t cwnd,
    SimTime smoothedRtt,
    double gain,
    std::uint32_t mss) {
  const auto window = std::max<std::uint64_t>(cwnd, 2ULL * mss);
  return gain * static_cast<double>(window) / toSeconds(smoothedRtt);
}

WindowController::WindowController(const WindowControllerConfig& config)
    : config_(config), hystart_(config.hystart) {
  state_.cwnd = static_cast<std::uint64_t>(config.initialWindowPackets) * config.mss;
  state_.smoothedRtt = config.initialRtt;
  updatePacingRate();
}

void WindowController::updatePacingRate() {
  state_.pacingRate =
      windowPacingRate(state_.cwnd, state_.smoothedRtt, config_.pacingGain, config_.mss);
}

void WindowController::onPacketSent(
    SimTime /*now*/,
    PacketNumber pn,
    std::uint32_t /*bytes*/,
    std::uint64_t /*bytesInFlight*/) {
  largestSent_ = std::max(largestSent_, pn);
}

void WindowController::trackRound(const AckEvent& ack) {
  roundEndedThisAck_ = false;
  if (ack.largestAcked > roundEnd_) {
    roundEnd_ = largestSent_;
    roundEndedThisAck_ = true;
  }
}

bool WindowController::onRecoveryEnd(const AckEvent& ack) {
  const auto cwnd = state_.cwnd;
  state_.phase = CongestionPhase::kAvoidance;
  recordEvent(ack.now, CcaEventKind::kRecoveryExit, cwnd, cwnd);
  return false;
}

void WindowController::enterAvoidance(SimTime now) {
  noteSlowStartExit(now, state_.cwnd);
  noteSlowStartEpochEnd(now);
  state_.phase = CongestionPhase::kAvoidance;
  if (state_.ssthresh > state_.cwnd) {
    state_.ssthresh = state_.cwnd;
  }
  onEnterAvoidance(now);
}

void WindowController::slowStart(const AckEvent& ack) {
  if (roundEndedThisAck_) {
    if (hystart_.inCss() && hystart_.cssRoundEnded()) {
      enterAvoidance(ack.now);
      hystart_.startRound();
      return;
    }
    hystart_.startRound();
  }
  if (ack.rttSample) {
    hystart_.onRttSample(*ack.rttSample);
  }
  if (hystart_.inCss()) {
    state_.cwnd += ack.ackedBytes / hystart_.config().cssGrowthDivisor;
    hystart_.shouldResumeSlowStart();
  } else {
    state_.cwnd += ack.ackedBytes;
    if (hystart_.config().enabled) {
      hystart_.shouldEnterCss();
    }
  }
  if (state_.cwnd >= state_.ssthresh) {
    enterAvoidance(ack.now);
  }
}

void WindowController::onAck(const AckEvent& ack) {
  state_.smoothedRtt = ack.smoothedRtt;
  trackRound(ack);
  if (state_.phase == CongestionPhase::kRecovery) {
    if (ack.largestAckedSentTime <= state_.recoveryStart) {
      updatePacingRate();
      return;
    }
    if (onRecoveryEnd(ack)) {
      updatePacingRate();
      return;
    }
  }
  if (state_.phase == CongestionPhase::kSlowStart) {
    slowStart(ack);
  } else {
    growInAvoidance(ack);
  }
  updatePacingRate();
}

void WindowController::onCongestionEvent(const LossEvent& loss) {
  if (inRecovery(loss.largestLostSentTime)) {
    return;
  }
  noteSlowStartExit(loss.now, state_.cwnd);
  noteSlowStartEpochEnd(loss.now);
  const auto before = state_.cwnd;
  reduce(loss);
  state_.cwnd = std::max(state_.cwnd, minWindow());
  state_.phase = CongestionPhase::kRecovery;
  state_.recoveryStart = loss.now;
  recordEvent(loss.now, CcaEventKind::kReduction, before, state_.cwnd);
  updatePacingRate();
}

NewReno::NewReno(const WindowControllerConfig& config) : WindowController(config) {}

void NewReno::growInAvoidance(const AckEvent& ack) {
  ackedAccumulator_ += ack.ackedBytes;
  while (ackedAccumulator_ >= state_.cwnd) {
    ackedAccumulator_ -= state_.cwnd;
    state_.cwnd += config_.mss;
  }
}

void NewReno::reduce(const LossEvent& /*loss*/) {
  state_.cwnd = std::max(state_.cwnd / 2, minWindow());
  state_.ssthresh = state_.cwnd;
  ackedAccumulator_ = 0;
}

double cubicK(double wMaxSegments, double beta, double cubicC) {
  return std::cbrt(wMaxSegments * (1.0 - beta) / cubicC);
}

double cubicWindow(double tSeconds, double k, double wMaxSegments, double cubicC) {
  const double d = tSeconds - k;
  return cubicC * d * d * d + wMaxSegments;
}

Cubic::Cubic(const CubicConfig& config) : WindowController(config.window) {
  cubic_.cubicC = config.cubicC;
  cubic_.beta = config.beta;
  cubic_.rollbackEnabled = config.rollbackEnabled;
  cubic_.spuriousThreshold = config.spuriousThreshold;
}

void Cubic::onEnterAvoidance(SimTime now) {
  cubic_.epochStart = now;
  cubic_.wMax = static_cast<double>(state_.cwnd);
  cubic_.k = 0.0;
  cubic_.epochActive = true;
}

void Cubic::growInAvoidance(const AckEvent& ack) {
  // ACKs for packets sent before a rollback belong to the rolled-back episode
  // and do not grow the restored window.
  if (growthHoldUntil_ && ack.largestAckedSentTime <= *growthHoldUntil_) {
    return;
  }
  growthHoldUntil_.reset();
  if (!cubic_.epochActive) {
    onEnterAvoidance(ack.now);
  }
  const double mss = config_.mss;
  const double cwnd = static_cast<double>(state_.cwnd);
  const double t = toSeconds(ack.now - cubic_.epochStart + state_.smoothedRtt);
  double target = cubicWindow(t, cubic_.k, cubic_.wMax / mss, cubic_.cubicC) * mss;
  target = std::clamp(target, cwnd, 1.5 * cwnd);
  cwndIncrement_ += (target - cwnd) * static_cast<double>(ack.ackedBytes) / cwnd;
  // Window moves in whole segments.
  while (cwndIncrement_ >= mss) {
    state_.cwnd += config_.mss;
    cwndIncrement_ -= mss;
  }
}

void Cubic::reduce(const LossEvent& loss) {
  growthHoldUntil_.reset();
  if (cubic_.rollbackEnabled) {
    cubic_.checkpoint =
        CubicCheckpoint{state_, cubic_.wMax, cubic_.k, cubic_.epochStart};
    cubic_.lostAtCheckpoint = loss.totalLost;
  }
  const double cwnd = static_cast<double>(state_.cwnd);
  cubic_.wMax = cwnd;
  // Partial-segment growth credit shrinks with the window.
  cwndIncrement_ *= cubic_.beta;
  state_.cwnd = std::max<std::uint64_t>(
      static_cast<std::uint64_t>(std::llround(cwnd * cubic_.beta)), minWindow());
  state_.ssthresh = state_.cwnd;
  cubic_.k = cubicK(cwnd / config_.mss, cubic_.beta, cubic_.cubicC);
  cubic_.epochStart = loss.now;
  cubic_.epochActive = true;
}

bool Cubic::onRecoveryEnd(const AckEvent& ack) {
  auto checkpoint = std::move(cubic_.checkpoint);
  cubic_.checkpoint.reset();
  const bool spurious = checkpoint && cubic_.rollbackEnabled &&
      ack.totalLost - cubic_.lostAtCheckpoint < cubic_.spuriousThreshold &&
      checkpoint->congestion.phase != CongestionPhase::kSlowStart;
  if (!spurious) {
    return WindowController::onRecoveryEnd(ack);
  }
  const auto before = state_.cwnd;
  const auto srtt = state_.smoothedRtt;
  state_ = checkpoint->congestion;
  state_.smoothedRtt = srtt;
  cubic_.wMax = checkpoint->wMax;
  cubic_.k = checkpoint->k;
  cubic_.epochStart = checkpoint->epochStart;
  // A snapshot taken inside an older recovery period has no checkpoint of its
  // own left to honor, so that period is over too.
  if (state_.phase == CongestionPhase::kRecovery) {
    state_.phase = CongestionPhase::kAvoidance;
  }
  growthHoldUntil_ = ack.now;
  ++rollbacks_;
  recordEvent(ack.now, CcaEventKind::kRollback, before, state_.cwnd);
  return true;
}

} // namespace pacesim

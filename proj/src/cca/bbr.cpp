#include "pacesim/cca/bbr.h"

#include <algorithm>

namespace pacesim {

void WindowedMaxFilter::update(double value, std::uint64_t round) {
  while (!samples_.empty() && samples_.back().value <= value) {
    samples_.pop_back();
  }
  samples_.push_back(Sample{value, round});
  while (!samples_.empty() && samples_.front().round + window_ <= round) {
    samples_.pop_front();
  }
}

Bbr::Bbr(const BbrConfig& config)
    : config_(config), bandwidthFilter_(config.bandwidthWindowRounds) {
  bbr_.pacingGain = config.startupGain;
  state_.cwnd = static_cast<std::uint64_t>(config.initialWindowPackets) * config.mss;
  state_.smoothedRtt = config.initialRtt;
  state_.pacingRate =
      windowPacingRate(state_.cwnd, config.initialRtt, config.startupGain, config.mss);
}

double Bbr::bdp() const noexcept {
  if (bbr_.minRtt == kInfiniteTime || bbr_.btlBw <= 0.0) {
    return static_cast<double>(config_.initialWindowPackets) * config_.mss;
  }
  return bbr_.btlBw * toSeconds(bbr_.minRtt);
}

void Bbr::updateRound(const AckEvent& ack) {
  roundStart_ = false;
  if (ack.deliveryRate && ack.deliveryRate->priorDelivered >= nextRoundDelivered_) {
    nextRoundDelivered_ = ack.delivered;
    ++bbr_.roundCount;
    roundStart_ = true;
  }
}

void Bbr::checkFullPipe() {
  if (bbr_.mode != BbrMode::kStartup || !roundStart_) {
    return;
  }
  if (bbr_.btlBw >= bbr_.fullBandwidth * config_.fullBandwidthGrowth) {
    bbr_.fullBandwidth = bbr_.btlBw;
    bbr_.fullBandwidthCount = 0;
    return;
  }
  if (++bbr_.fullBandwidthCount >= config_.fullBandwidthRounds) {
    bbr_.mode = BbrMode::kDrain;
    bbr_.pacingGain = 1.0 / config_.startupGain;
  }
}

void Bbr::enterProbeBw(SimTime now) {
  bbr_.mode = BbrMode::kProbeBw;
  bbr_.gainCycleIndex = 0;
  bbr_.pacingGain = kProbeBwGainCycle[0];
  bbr_.cycleStamp = now;
}

void Bbr::updateCycle(const AckEvent& ack) {
  // Bytes parked on the host behind a future timestamp are not in the pipe.
  const std::uint64_t inNetwork =
      ack.bytesInFlight - std::min(ack.bytesInFlight, ack.bytesInHost);
  if (bbr_.mode == BbrMode::kDrain && static_cast<double>(inNetwork) <= bdp()) {
    enterProbeBw(ack.now);
    return;
  }
  if (bbr_.mode != BbrMode::kProbeBw || bbr_.minRtt == kInfiniteTime) {
    return;
  }
  if (ack.now - bbr_.cycleStamp >= bbr_.minRtt) {
    bbr_.gainCycleIndex = (bbr_.gainCycleIndex + 1) % kProbeBwGainCycle.size();
    bbr_.pacingGain = kProbeBwGainCycle[bbr_.gainCycleIndex];
    bbr_.cycleStamp = ack.now;
  }
}

void Bbr::updateWindowAndRate(const AckEvent& ack) {
  const double gain =
      bbr_.mode == BbrMode::kStartup ? config_.startupGain : config_.cwndGain;
  const auto floor = static_cast<std::uint64_t>(config_.minWindowPackets) * config_.mss;
  if (bbr_.btlBw > 0.0 && bbr_.minRtt != kInfiniteTime) {
    const auto target = static_cast<std::uint64_t>(gain * bdp());
    if (bbr_.mode == BbrMode::kStartup) {
      state_.cwnd = std::max(state_.cwnd, std::min(state_.cwnd + ack.ackedBytes, target));
    } else {
      state_.cwnd = std::min(state_.cwnd + ack.ackedBytes, target);
    }
    state_.cwnd = std::max(state_.cwnd, floor);
    state_.pacingRate = bbr_.pacingGain * bbr_.btlBw;
  } else {
    state_.cwnd += ack.ackedBytes;
    state_.pacingRate = windowPacingRate(
        state_.cwnd, state_.smoothedRtt, bbr_.pacingGain, config_.mss);
  }
  state_.phase = bbr_.mode == BbrMode::kStartup ? CongestionPhase::kSlowStart
                                                : CongestionPhase::kAvoidance;
}

void Bbr::onAck(const AckEvent& ack) {
  state_.smoothedRtt = ack.smoothedRtt;
  updateRound(ack);
  if (ack.deliveryRate && ack.deliveryRate->bytesPerSecond > 0.0) {
    bandwidthFilter_.update(ack.deliveryRate->bytesPerSecond, bbr_.roundCount);
    bbr_.btlBw = bandwidthFilter_.best();
  }
  if (ack.rttSample) {
    const bool expired = ack.now - bbr_.minRttStamp > config_.minRttWindow;
    if (*ack.rttSample <= bbr_.minRtt || expired) {
      bbr_.minRtt = *ack.rttSample;
      bbr_.minRttStamp = ack.now;
    }
  }
  const auto modeBefore = bbr_.mode;
  checkFullPipe();
  updateCycle(ack);
  if (modeBefore == BbrMode::kStartup && bbr_.mode != BbrMode::kStartup) {
    noteSlowStartExit(ack.now, state_.cwnd);
    noteSlowStartEpochEnd(ack.now);
  }
  updateWindowAndRate(ack);
}

void Bbr::onCongestionEvent(const LossEvent& loss) {
  recordEvent(loss.now, CcaEventKind::kReduction, state_.cwnd, state_.cwnd);
}

} // namespace pacesim

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pacesim/cca/bbr.h"
#include "pacesim/cca/hystart.h"
#include "pacesim/cca/window_controller.h"
#include "pacesim/sim/rng.h"

namespace pacesim {
namespace {

constexpr std::uint32_t kMss = 1500;

AckEvent ackAt(SimTime now, SimTime sentTime, std::uint64_t bytes, std::uint64_t totalLost) {
  AckEvent ack;
  ack.now = now;
  ack.ackedBytes = bytes;
  ack.largestAckedSentTime = sentTime;
  ack.rttSample = now - sentTime;
  ack.smoothedRtt = 40ms;
  ack.minRtt = 40ms;
  ack.totalLost = totalLost;
  return ack;
}

LossEvent lossAt(SimTime now, SimTime lostSentTime, std::uint64_t totalLost) {
  LossEvent loss;
  loss.now = now;
  loss.largestLostSentTime = lostSentTime;
  loss.lostCount = 1;
  loss.lostBytes = kMss;
  loss.totalLost = totalLost;
  return loss;
}

CubicConfig cubicConfig(bool rollback, std::uint32_t initialPackets = 100) {
  CubicConfig config;
  config.window.initialWindowPackets = initialPackets;
  config.window.hystart.enabled = false;
  config.rollbackEnabled = rollback;
  return config;
}

// Takes a fresh controller through one real reduction and out of recovery so
// the next congestion event starts from congestion avoidance.
void enterAvoidance(Cubic& cubic, std::uint64_t& totalLost) {
  totalLost += 3;
  cubic.onCongestionEvent(lossAt(1s, 900ms, totalLost));
  cubic.onAck(ackAt(1100ms, 1050ms, kMss, totalLost));
  ASSERT_EQ(cubic.state().phase, CongestionPhase::kAvoidance);
}

TEST(CubicK, HundredSegmentExample) {
  EXPECT_NEAR(cubicK(100.0, 0.7, 0.4), 4.217, 5e-4);
  EXPECT_DOUBLE_EQ(cubicK(100.0, 0.7, 0.4), std::cbrt(75.0));
}

TEST(CubicK, MatchesDirectEvaluationForRandomWindows) {
  RngStream rng(2024, "wmax");
  for (int i = 0; i < 100; ++i) {
    const double wMax = 2.0 + rng.uniform() * 10000.0;
    const double direct = std::pow(wMax * (1.0 - 0.7) / 0.4, 1.0 / 3.0);
    EXPECT_NEAR(cubicK(wMax, 0.7, 0.4), direct, 1e-6) << "w_max " << wMax;
  }
}

TEST(CubicWindow, EqualsWmaxAtK) {
  RngStream rng(5, "wmax");
  for (int i = 0; i < 100; ++i) {
    const double wMax = 2.0 + rng.uniform() * 10000.0;
    const double k = cubicK(wMax, 0.7, 0.4);
    EXPECT_EQ(cubicWindow(k, k, wMax, 0.4), wMax);
  }
}

TEST(Cubic, SlowStartGrowsByAckedBytes) {
  Cubic cubic(cubicConfig(false, 10));
  cubic.onAck(ackAt(40ms, kZeroTime, 2 * kMss, 0));
  EXPECT_EQ(cubic.cwnd(), 12u * kMss);
}

TEST(Cubic, ReductionAppliesBeta) {
  Cubic cubic(cubicConfig(false));
  cubic.onCongestionEvent(lossAt(1s, 900ms, 1));
  EXPECT_EQ(cubic.cwnd(), 70u * kMss);
  EXPECT_EQ(cubic.state().ssthresh, 70u * kMss);
  EXPECT_EQ(cubic.state().phase, CongestionPhase::kRecovery);
  EXPECT_DOUBLE_EQ(cubic.cubicState().wMax, 100.0 * kMss);
  EXPECT_DOUBLE_EQ(cubic.cubicState().k, cubicK(100.0, 0.7, 0.4));
}

TEST(Cubic, OneReductionPerRecoveryPeriod) {
  Cubic cubic(cubicConfig(false));
  cubic.onCongestionEvent(lossAt(1s, 900ms, 1));
  cubic.onCongestionEvent(lossAt(1040ms, 950ms, 2));
  EXPECT_EQ(cubic.cwnd(), 70u * kMss);
  EXPECT_EQ(cubic.events().size(), 1u);
}

TEST(Cubic, CheckpointEqualsPreReductionState) {
  Cubic cubic(cubicConfig(true));
  std::uint64_t lost = 0;
  enterAvoidance(cubic, lost);
  const CongestionState before = cubic.state();
  const CubicState cubicBefore = cubic.cubicState();
  cubic.onCongestionEvent(lossAt(2s, 1950ms, ++lost));
  const auto& checkpoint = cubic.cubicState().checkpoint;
  ASSERT_TRUE(checkpoint.has_value());
  EXPECT_EQ(checkpoint->congestion, before);
  EXPECT_EQ(checkpoint->wMax, cubicBefore.wMax);
  EXPECT_EQ(checkpoint->k, cubicBefore.k);
  EXPECT_EQ(checkpoint->epochStart, cubicBefore.epochStart);
}

TEST(Cubic, SpuriousLossRestoresCheckpointExactly) {
  Cubic cubic(cubicConfig(true));
  std::uint64_t lost = 0;
  enterAvoidance(cubic, lost);
  lost += 1;
  cubic.onCongestionEvent(lossAt(2s, 1950ms, lost));
  const CubicCheckpoint checkpoint = *cubic.cubicState().checkpoint;
  // Two losses since the checkpoint, below the threshold of three.
  lost += 1;
  cubic.onAck(ackAt(2050ms, 2010ms, kMss, lost));
  EXPECT_EQ(cubic.rollbackCount(), 1u);
  EXPECT_EQ(cubic.cwnd(), checkpoint.congestion.cwnd);
  EXPECT_EQ(cubic.state().ssthresh, checkpoint.congestion.ssthresh);
  EXPECT_EQ(cubic.cubicState().wMax, checkpoint.wMax);
  EXPECT_EQ(cubic.cubicState().k, checkpoint.k);
  EXPECT_EQ(cubic.cubicState().epochStart, checkpoint.epochStart);
  EXPECT_FALSE(cubic.cubicState().checkpoint.has_value());
}

TEST(Cubic, LossesAtThresholdKeepTheReduction) {
  Cubic cubic(cubicConfig(true));
  std::uint64_t lost = 0;
  enterAvoidance(cubic, lost);
  lost += 1;
  cubic.onCongestionEvent(lossAt(2s, 1950ms, lost));
  const auto reduced = cubic.cwnd();
  lost += 3;
  cubic.onAck(ackAt(2050ms, 2010ms, kMss, lost));
  EXPECT_EQ(cubic.rollbackCount(), 0u);
  EXPECT_EQ(cubic.cwnd(), reduced);
}

TEST(Cubic, RollbackDisabledNeverRestores) {
  Cubic cubic(cubicConfig(false));
  std::uint64_t lost = 0;
  enterAvoidance(cubic, lost);
  cubic.onCongestionEvent(lossAt(2s, 1950ms, ++lost));
  const auto reduced = cubic.cwnd();
  cubic.onAck(ackAt(2050ms, 2010ms, kMss, lost));
  EXPECT_EQ(cubic.rollbackCount(), 0u);
  EXPECT_EQ(cubic.cwnd(), reduced);
  EXPECT_FALSE(cubic.cubicState().checkpoint.has_value());
}

// One lost packet per cycle, each followed only by the ACK that ends the
// recovery period.
std::vector<CcaEventRecord> periodicSingleLossTrace(bool rollback, int cycles) {
  Cubic cubic(cubicConfig(rollback));
  std::uint64_t lost = 0;
  enterAvoidance(cubic, lost);
  const auto skip = cubic.events().size();
  SimTime t = 2s;
  for (int i = 0; i < cycles; ++i) {
    cubic.onCongestionEvent(lossAt(t, t - 50ms, ++lost));
    cubic.onAck(ackAt(t + 50ms, t + 10ms, kMss, lost));
    t += 200ms;
  }
  return {cubic.events().begin() + static_cast<std::ptrdiff_t>(skip), cubic.events().end()};
}

TEST(CubicProperty, PeriodicSingleLossAlternatesBetweenTwoWindows) {
  const auto events = periodicSingleLossTrace(true, 20);
  std::set<std::uint64_t> windows;
  int reductions = 0;
  for (const auto& e : events) {
    if (e.kind == CcaEventKind::kReduction || e.kind == CcaEventKind::kRollback) {
      windows.insert(e.cwndBefore);
      windows.insert(e.cwndAfter);
      reductions += e.kind == CcaEventKind::kReduction;
    }
  }
  EXPECT_EQ(reductions, 20);
  EXPECT_EQ(windows.size(), 2u);
}

// Every reduction shrinks the window until it sits at the two-packet floor.
TEST(CubicProperty, WithoutRollbackEveryEventShrinksTheWindow) {
  int shrinking = 0;
  for (const auto& e : periodicSingleLossTrace(false, 20)) {
    if (e.kind == CcaEventKind::kReduction) {
      if (e.cwndBefore > 2 * kMss) {
        EXPECT_LT(e.cwndAfter, e.cwndBefore);
        ++shrinking;
      } else {
        EXPECT_EQ(e.cwndAfter, 2 * kMss);
      }
    }
  }
  EXPECT_GT(shrinking, 5);
}

struct TraceChecks {
  bool windowFloor{true};
  bool positiveRate{true};
  bool checkpointIff{true};
  bool reductionsShrink{true};
  bool kFormula{true};
};

// Random interleavings of ACKs and loss events.
TraceChecks randomTrace(bool rollback, std::uint64_t seed) {
  RngStream rng(seed, "trace");
  CubicConfig config = cubicConfig(rollback, 10);
  config.window.hystart.enabled = rng.uniform() < 0.5;
  Cubic cubic(config);
  TraceChecks checks;
  std::uint64_t lost = 0;
  PacketNumber pn = 0;
  SimTime now = kZeroTime;
  for (int step = 0; step < 2000; ++step) {
    now += SimTime{static_cast<std::int64_t>(rng.next() % 2'000'000)};
    cubic.onPacketSent(now, ++pn, kMss, 0);
    if (rng.uniform() < 0.03) {
      lost += 1 + rng.next() % 4;
      const auto before = cubic.events().size();
      cubic.onCongestionEvent(lossAt(now, now - 45ms, lost));
      if (cubic.events().size() > before) {
        const auto& e = cubic.events().back();
        checks.reductionsShrink &= e.cwndAfter <= e.cwndBefore;
        const auto& s = cubic.cubicState();
        checks.kFormula &= std::abs(s.k - cubicK(s.wMax / kMss, s.beta, s.cubicC)) < 1e-12;
      }
    } else {
      AckEvent ack = ackAt(now, now - 40ms - SimTime{static_cast<std::int64_t>(rng.next() % 5'000'000)}, kMss * (1 + rng.next() % 2), lost);
      ack.largestAcked = pn > 20 ? pn - 20 : 0;
      cubic.onAck(ack);
    }
    const auto& state = cubic.state();
    checks.windowFloor &= state.cwnd >= 2 * kMss;
    checks.positiveRate &= state.pacingRate > 0.0;
    checks.checkpointIff &= cubic.cubicState().checkpoint.has_value() ==
        (rollback && state.phase == CongestionPhase::kRecovery);
  }
  return checks;
}

TEST(CubicProperty, RandomTracesKeepInvariants) {
  for (bool rollback : {false, true}) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto checks = randomTrace(rollback, seed);
      EXPECT_TRUE(checks.windowFloor) << seed;
      EXPECT_TRUE(checks.positiveRate) << seed;
      EXPECT_TRUE(checks.checkpointIff) << seed;
      EXPECT_TRUE(checks.kFormula) << seed;
      if (!rollback) {
        EXPECT_TRUE(checks.reductionsShrink) << seed;
      }
    }
  }
}

TEST(NewReno, HalvesAndGrowsOneSegmentPerWindow) {
  WindowControllerConfig config;
  config.initialWindowPackets = 20;
  config.hystart.enabled = false;
  NewReno reno(config);
  reno.onCongestionEvent(lossAt(1s, 900ms, 1));
  EXPECT_EQ(reno.cwnd(), 10u * kMss);
  reno.onAck(ackAt(1100ms, 1050ms, kMss, 1));
  ASSERT_EQ(reno.state().phase, CongestionPhase::kAvoidance);
  // The exit ACK already counted one segment; nine more complete the window.
  for (int i = 0; i < 9; ++i) {
    reno.onAck(ackAt(1200ms, 1150ms, kMss, 1));
  }
  EXPECT_EQ(reno.cwnd(), 11u * kMss);
}

TEST(Hystart, DelayIncreaseAboveThresholdExits) {
  HystartState state;
  state.rttSampleCount = 8;
  state.lastRoundMinRtt = 40ms;
  state.currentRoundMinRtt = 46ms;
  EXPECT_EQ(hystartRttThreshold(40ms, {}), 5ms);
  EXPECT_EQ(hystartOnRoundEnd(state), HystartDecision::kExitToCss);
  state.currentRoundMinRtt = 45ms;
  EXPECT_EQ(hystartOnRoundEnd(state), HystartDecision::kExitToCss);
}

TEST(Hystart, SmallIncreaseStays) {
  HystartState state;
  state.rttSampleCount = 8;
  state.lastRoundMinRtt = 40ms;
  state.currentRoundMinRtt = 41ms;
  EXPECT_EQ(hystartOnRoundEnd(state), HystartDecision::kStay);
}

TEST(Hystart, TooFewSamplesStay) {
  HystartState state;
  state.rttSampleCount = 7;
  state.lastRoundMinRtt = 40ms;
  state.currentRoundMinRtt = 100ms;
  EXPECT_EQ(hystartOnRoundEnd(state), HystartDecision::kStay);
}

TEST(Hystart, ThresholdIsClamped) {
  EXPECT_EQ(hystartRttThreshold(10ms, {}), 4ms);
  EXPECT_EQ(hystartRttThreshold(400ms, {}), 16ms);
}

TEST(PacingRate, WindowRateExample) {
  EXPECT_DOUBLE_EQ(windowPacingRate(200'000, 40ms, 1.25, kMss), 6.25e6);
}

TEST(PacingRate, WindowFloorOfTwoSegments) {
  EXPECT_DOUBLE_EQ(windowPacingRate(0, 40ms, 1.0, kMss), 2.0 * kMss / 0.04);
}

AckEvent bbrAck(SimTime now, double rate, std::uint64_t& delivered, std::uint64_t inFlight) {
  AckEvent ack = ackAt(now, now - 40ms, 10 * kMss, 0);
  DeliveryRateSample sample;
  sample.bytesPerSecond = rate;
  sample.priorDelivered = delivered;
  delivered += 10 * kMss;
  ack.delivered = delivered;
  ack.deliveryRate = sample;
  ack.bytesInFlight = inFlight;
  return ack;
}

TEST(Bbr, PlateauOfThreeRoundsLeavesStartup) {
  Bbr bbr(BbrConfig{});
  std::uint64_t delivered = 0;
  SimTime now = 100ms;
  bbr.onAck(bbrAck(now, 5e6, delivered, 1'000'000));
  for (int round = 1; round <= 2; ++round) {
    now += 40ms;
    bbr.onAck(bbrAck(now, 5.5e6, delivered, 1'000'000));
    EXPECT_EQ(bbr.bbrState().mode, BbrMode::kStartup) << round;
  }
  now += 40ms;
  bbr.onAck(bbrAck(now, 5.5e6, delivered, 1'000'000));
  EXPECT_EQ(bbr.bbrState().mode, BbrMode::kDrain);
  EXPECT_DOUBLE_EQ(bbr.bbrState().pacingGain, 1.0 / 2.77);
}

TEST(Bbr, GrowingBandwidthStaysInStartup) {
  Bbr bbr(BbrConfig{});
  std::uint64_t delivered = 0;
  double rate = 1e6;
  for (int round = 0; round < 10; ++round) {
    bbr.onAck(bbrAck(100ms + round * 40ms, rate, delivered, 1'000'000));
    rate *= 1.3;
  }
  EXPECT_EQ(bbr.bbrState().mode, BbrMode::kStartup);
}

TEST(Bbr, MinRttFilterKeepsMinimum) {
  Bbr bbr(BbrConfig{});
  std::uint64_t delivered = 0;
  SimTime now = 100ms;
  for (auto rtt : {42ms, 40ms, 41ms}) {
    AckEvent ack = bbrAck(now, 5e6, delivered, 0);
    ack.rttSample = rtt;
    bbr.onAck(ack);
    now += 10ms;
  }
  EXPECT_EQ(bbr.bbrState().minRtt, 40ms);
}

TEST(Bbr, ProbeBwCyclesGainOncePerMinRtt) {
  Bbr bbr(BbrConfig{});
  std::uint64_t delivered = 0;
  SimTime now = 100ms;
  for (int round = 0; round < 4; ++round, now += 40ms) {
    bbr.onAck(bbrAck(now, 5e6, delivered, 1'000'000));
  }
  ASSERT_EQ(bbr.bbrState().mode, BbrMode::kDrain);
  // Still more than one BDP (200 kB) in flight.
  bbr.onAck(bbrAck(now, 5e6, delivered, 300'000));
  EXPECT_EQ(bbr.bbrState().mode, BbrMode::kDrain);
  now += 10ms;
  bbr.onAck(bbrAck(now, 5e6, delivered, 150'000));
  ASSERT_EQ(bbr.bbrState().mode, BbrMode::kProbeBw);
  EXPECT_DOUBLE_EQ(bbr.bbrState().pacingGain, 1.25);
  EXPECT_DOUBLE_EQ(bbr.pacingRate(), 1.25 * 5e6);
  now += 20ms;
  bbr.onAck(bbrAck(now, 5e6, delivered, 150'000));
  EXPECT_DOUBLE_EQ(bbr.bbrState().pacingGain, 1.25);
  now += 20ms;
  bbr.onAck(bbrAck(now, 5e6, delivered, 150'000));
  EXPECT_DOUBLE_EQ(bbr.bbrState().pacingGain, 0.75);
  EXPECT_DOUBLE_EQ(bbr.pacingRate(), 3.75e6);
}

TEST(Bbr, HostQueuedBytesDoNotBlockDrainExit) {
  Bbr bbr(BbrConfig{});
  std::uint64_t delivered = 0;
  SimTime now = 100ms;
  for (int round = 0; round < 4; ++round, now += 40ms) {
    bbr.onAck(bbrAck(now, 5e6, delivered, 1'000'000));
  }
  AckEvent ack = bbrAck(now, 5e6, delivered, 300'000);
  ack.bytesInHost = 200'000;
  bbr.onAck(ack);
  EXPECT_EQ(bbr.bbrState().mode, BbrMode::kProbeBw);
}

TEST(BbrProperty, PacingRateIsGainTimesBandwidth) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    RngStream rng(seed, "bbr");
    Bbr bbr(BbrConfig{});
    std::uint64_t delivered = 0;
    SimTime now = 100ms;
    for (int i = 0; i < 500; ++i) {
      now += SimTime{static_cast<std::int64_t>(1 + rng.next() % 20'000'000)};
      bbr.onAck(bbrAck(now, 1e6 + rng.uniform() * 9e6, delivered, rng.next() % 600'000));
      const auto& s = bbr.bbrState();
      ASSERT_GE(bbr.pacingRate(), 0.0);
      ASSERT_DOUBLE_EQ(bbr.pacingRate(), s.pacingGain * s.btlBw);
      ASSERT_GE(bbr.cwnd(), 4u * kMss);
    }
  }
}

TEST(WindowedMaxFilter, ExpiresOldRounds) {
  WindowedMaxFilter filter(10);
  filter.update(9.0, 0);
  filter.update(5.0, 3);
  EXPECT_EQ(filter.best(), 9.0);
  filter.update(4.0, 10);
  EXPECT_EQ(filter.best(), 5.0);
  filter.update(6.0, 11);
  EXPECT_EQ(filter.best(), 6.0);
}

} // namespace
} // namespace pacesim

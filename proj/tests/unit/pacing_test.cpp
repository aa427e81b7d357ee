#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pacesim/analysis/metrics.h"
#include "pacesim/pacing/gso.h"
#include "pacesim/pacing/leaky_bucket.h"
#include "pacesim/pacing/pacer.h"
#include "pacesim/qdisc/nic.h"
#include "pacesim/sim/engine.h"
#include "pacesim/sim/rng.h"
#include "pacesim/testbed/testbed.h"

namespace pacesim {
namespace {

constexpr double k40Mbit = 5e6;

Packet packetOf(std::uint32_t size = 1500, PacketNumber pn = 0) {
  Packet p;
  p.packetNumber = pn;
  p.size = size;
  return p;
}

std::vector<Packet> segments(std::size_t count) {
  std::vector<Packet> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(packetOf(1500, i));
  }
  return out;
}

TEST(TimestampPacer, BackloggedPacketsAreThreeTenthsOfAMillisecondApart) {
  TimestampPacer pacer;
  std::vector<SimTime> intended;
  for (int i = 0; i < 100; ++i) {
    Packet p = packetOf();
    pacer.pace(p, k40Mbit, kZeroTime);
    intended.push_back(*p.intendedTxTime);
    EXPECT_TRUE(p.txtimeAttached);
  }
  EXPECT_EQ(intended.front(), kZeroTime);
  for (std::size_t i = 1; i < intended.size(); ++i) {
    EXPECT_EQ(intended[i] - intended[i - 1], 300us);
  }
}

TEST(TimestampPacer, FirstPacketIsStampedNow) {
  TimestampPacer pacer;
  Packet p = packetOf();
  pacer.pace(p, k40Mbit, 7ms);
  EXPECT_EQ(*p.intendedTxTime, 7ms);
}

TEST(TimestampPacer, IdleResetsTheChain) {
  TimestampPacer pacer;
  Packet a = packetOf();
  pacer.pace(a, k40Mbit, kZeroTime);
  Packet b = packetOf();
  pacer.pace(b, k40Mbit, 10ms);
  EXPECT_EQ(*b.intendedTxTime, 10ms);
}

TEST(IntervalPacer, SameSpacingWithoutTimestamp) {
  IntervalPacer pacer;
  SimTime previous = kZeroTime;
  for (int i = 0; i < 10; ++i) {
    Packet p = packetOf();
    const SimTime release = pacer.pace(p, k40Mbit, kZeroTime);
    EXPECT_FALSE(p.txtimeAttached);
    if (i > 0) {
      EXPECT_EQ(release - previous, 300us);
    }
    previous = release;
  }
}

TEST(PacerProperty, BackloggedSpacingIsExactToOneNanosecond) {
  RngStream rng(11, "rates");
  for (int trial = 0; trial < 20; ++trial) {
    const double rate = 1e5 + rng.uniform() * 1e8;
    const std::uint32_t size = 64 + static_cast<std::uint32_t>(rng.next() % 1437);
    const double exact = size * 1e9 / rate;
    TimestampPacer pacer;
    SimTime previous = kZeroTime;
    for (int i = 0; i < 100'000; ++i) {
      Packet p = packetOf(size);
      pacer.pace(p, rate, kZeroTime);
      if (i > 0) {
        ASSERT_LE(std::abs(static_cast<double>((*p.intendedTxTime - previous).count()) - exact), 1.0);
      }
      previous = *p.intendedTxTime;
    }
  }
}

TEST(PacerProperty, IntendedTimesNeverDecrease) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    RngStream rng(seed, "pacer");
    TimestampPacer pacer;
    SimTime now = kZeroTime;
    SimTime last = kZeroTime;
    for (int i = 0; i < 2000; ++i) {
      now += SimTime{static_cast<std::int64_t>(rng.next() % 1'000'000)};
      Packet p = packetOf(100 + static_cast<std::uint32_t>(rng.next() % 1400));
      pacer.pace(p, 1e5 + rng.uniform() * 1e7, now);
      ASSERT_GE(*p.intendedTxTime, last);
      ASSERT_GE(*p.intendedTxTime, now);
      last = *p.intendedTxTime;
    }
  }
}

TEST(LeakyBucket, FullBucketAdmitsSixteenThenWaits) {
  LeakyBucket bucket(16 * 1500, k40Mbit, kZeroTime);
  for (int i = 0; i < 16; ++i) {
    EXPECT_TRUE(std::holds_alternative<SendNow>(bucket.admit(1500, kZeroTime))) << i;
  }
  const auto last = bucket.admit(1500, kZeroTime);
  ASSERT_TRUE(std::holds_alternative<WaitUntil>(last));
  EXPECT_EQ(std::get<WaitUntil>(last).time, 300us);
}

TEST(LeakyBucket, EmptyBucketWaitsForCredit) {
  LeakyBucket bucket(1500, 3e6, kZeroTime);
  ASSERT_TRUE(std::holds_alternative<SendNow>(bucket.admit(1500, kZeroTime)));
  const auto decision = bucket.admit(1500, kZeroTime);
  ASSERT_TRUE(std::holds_alternative<WaitUntil>(decision));
  EXPECT_EQ(std::get<WaitUntil>(decision).time, 500us);
}

TEST(LeakyBucket, ArrivalsAtLeakRateKeepLevelConstant) {
  LeakyBucket bucket(16 * 1500, k40Mbit, kZeroTime);
  SimTime now = kZeroTime;
  ASSERT_TRUE(std::holds_alternative<SendNow>(bucket.admit(1500, now)));
  const double level = bucket.level();
  for (int i = 0; i < 1000; ++i) {
    now += 300us;
    ASSERT_TRUE(std::holds_alternative<SendNow>(bucket.admit(1500, now)));
    ASSERT_DOUBLE_EQ(bucket.level(), level);
  }
}

TEST(LeakyBucket, IdleRefillAllowsFullBurst) {
  LeakyBucket bucket(16 * 1500, k40Mbit, kZeroTime);
  while (std::holds_alternative<SendNow>(bucket.admit(1500, kZeroTime))) {
  }
  // capacity / leak rate = 4.8 ms.
  const SimTime later = 4800us;
  int burst = 0;
  while (std::holds_alternative<SendNow>(bucket.admit(1500, later))) {
    ++burst;
  }
  EXPECT_EQ(burst, 16);
}

TEST(LeakyBucketProperty, CreditIsConservedAndBounded) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RngStream rng(seed, "bucket");
    const double capacity = 16 * 1500;
    double rate = 1e6 + rng.uniform() * 1e7;
    LeakyBucket bucket(16 * 1500, rate, kZeroTime);
    // Shadow account: linear refill capped at capacity, minus admitted bytes.
    double expected = capacity;
    SimTime last = kZeroTime;
    SimTime now = kZeroTime;
    std::uint64_t admitted = 0;
    auto settle = [&] {
      expected = std::min(capacity, expected + rate * toSeconds(now - last));
      last = now;
    };
    for (int i = 0; i < 1000; ++i) {
      now += SimTime{static_cast<std::int64_t>(rng.next() % 2'000'000)};
      if (rng.uniform() < 0.1) {
        settle();
        rate = 1e6 + rng.uniform() * 1e7;
        bucket.setLeakRate(rate, now);
      }
      const auto size = 100 + static_cast<std::uint32_t>(rng.next() % 1400);
      settle();
      const bool send = std::holds_alternative<SendNow>(bucket.admit(size, now));
      ASSERT_EQ(send, expected >= size);
      if (send) {
        expected -= size;
        admitted += size;
      }
      ASSERT_NEAR(bucket.level(), expected, 1e-6);
      ASSERT_GE(bucket.level(), 0.0);
      ASSERT_LE(bucket.level(), capacity);
    }
    EXPECT_EQ(bucket.bytesAdmitted(), admitted);
  }
}

TEST(Pacer, WaitUntilIsNeverLaterThanCredit) {
  PacerConfig config;
  config.strategy = PacerStrategy::kLeakyBucket;
  config.bucketCapacityPackets = 1;
  Pacer pacer(config, 1500);
  const SimTime first = pacer.releaseTime(1500, 3e6, kZeroTime, kZeroTime);
  ASSERT_EQ(first, kZeroTime);
  pacer.commit(1500, 3e6, kZeroTime, first, kZeroTime);
  EXPECT_EQ(pacer.releaseTime(1500, 3e6, kZeroTime, kZeroTime), 500us);
}

TEST(Gso, BurstReleasesEverySegmentNow) {
  GsoConfig config;
  config.enabled = true;
  const auto buffer = segments(16);
  const auto timed = gsoEmit(buffer, config, k40Mbit, 3ms);
  ASSERT_EQ(timed.size(), 16u);
  for (const auto& t : timed) {
    EXPECT_EQ(t.release, 3ms);
  }
}

TEST(Gso, PacedSpacesSegmentsByBufferRate) {
  GsoConfig config;
  config.enabled = true;
  config.mode = GsoMode::kPaced;
  const auto buffer = segments(10);
  const auto timed = gsoEmit(buffer, config, 5e6, kZeroTime);
  ASSERT_EQ(timed.size(), 10u);
  for (std::size_t i = 0; i < timed.size(); ++i) {
    EXPECT_EQ(timed[i].release, static_cast<std::int64_t>(i) * 300us);
  }
}

TEST(Gso, SingleSegmentIsIdenticalInBothModes) {
  GsoConfig burst;
  GsoConfig paced;
  paced.mode = GsoMode::kPaced;
  const auto buffer = segments(1);
  EXPECT_EQ(gsoEmit(buffer, burst, k40Mbit, 1ms)[0].release, 1ms);
  EXPECT_EQ(gsoEmit(buffer, paced, k40Mbit, 1ms)[0].release, 1ms);
}

TEST(Gso, RejectsEmptyAndOversizedBuffers) {
  GsoConfig config;
  EXPECT_THROW(gsoEmit({}, config, k40Mbit, kZeroTime), std::invalid_argument);
  const auto buffer = segments(17);
  EXPECT_THROW(gsoEmit(buffer, config, k40Mbit, kZeroTime), std::invalid_argument);
}

TEST(Gso, BurstBufferIsOneTrainOnTheWire) {
  EventEngine engine;
  std::vector<PacketLogEntry> log;
  Nic nic(
      engine,
      NicModel{},
      [&](Packet p) { log.push_back(PacketLogEntry{p.packetNumber, p.size, {}, p.actualTxTime, false}); },
      {});
  GsoConfig config;
  config.enabled = true;
  const auto buffer = segments(16);
  for (auto& [packet, release] : gsoEmit(buffer, config, k40Mbit, 1ms)) {
    nic.transmit(packet, release);
  }
  engine.run();
  const auto stats = extractTrains(log);
  EXPECT_EQ(stats.lengths, std::vector<std::uint32_t>{16});
}

RunConfig smallRun() {
  RunConfig config;
  config.transfer.objectSize = 10ULL * 1024 * 1024;
  config.qdisc = QdiscKind::kFifo;
  config.pacer.strategy = PacerStrategy::kInterval;
  return config;
}

TEST(IntervalPacing, PacedGsoWithOneSegmentMatchesPlainInterval) {
  for (std::uint64_t seed : {1, 2, 3}) {
    RunConfig plain = smallRun();
    RunConfig gso = plain;
    gso.gso.enabled = true;
    gso.gso.mode = GsoMode::kPaced;
    gso.gso.maxSegments = 1;
    const auto a = runSimulation(plain, seed);
    const auto b = runSimulation(gso, seed);
    ASSERT_EQ(a.packetLog.size(), b.packetLog.size());
    for (std::size_t i = 0; i < a.packetLog.size(); ++i) {
      ASSERT_EQ(a.packetLog[i].departureTime, b.packetLog[i].departureTime) << i;
      ASSERT_EQ(a.packetLog[i].intendedTxTime, b.packetLog[i].intendedTxTime) << i;
    }
    EXPECT_EQ(a.goodputBps, b.goodputBps);
  }
}

TEST(IntervalPacing, NoJitterReleasesAtComputedTime) {
  RunConfig config = smallRun();
  config.path.rateBps = 4e6;
  config.path.bufferBytes = 40'000;
  config.transfer.objectSize = 2ULL * 1024 * 1024;
  const auto result = runSimulation(config, 1);
  ASSERT_TRUE(result.complete);
  std::size_t exact = 0;
  for (const auto& e : result.packetLog) {
    exact += e.departureTime == *e.intendedTxTime;
  }
  EXPECT_EQ(exact, result.packetLog.size());
}

// User-space timer jitter of 0.5 ms shows up as 0.5 ms precision when the
// pacing interval is long enough that releases rarely queue behind each other.
TEST(IntervalPacing, ReleaseJitterSetsPrecision) {
  RunConfig config = smallRun();
  config.path.rateBps = 4e6;
  config.path.bufferBytes = 40'000;
  config.transfer.objectSize = 16ULL * 1024 * 1024;
  config.pacer.releaseJitter = JitterModel::normal(500us);
  const auto result = runSimulation(config, 1);
  ASSERT_TRUE(result.complete);
  ASSERT_GE(result.packetLog.size(), 10'000u);
  ASSERT_TRUE(result.precisionNs.has_value());
  EXPECT_NEAR(*result.precisionNs, 500e3, 50e3);
}

} // namespace
} // namespace pacesim

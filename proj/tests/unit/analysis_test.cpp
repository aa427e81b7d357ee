#include <gtest/gtest.h>

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pacesim/analysis/csv.h"
#include "pacesim/analysis/metrics.h"
#include "pacesim/sim/rng.h"

namespace pacesim {
namespace {

std::vector<PacketLogEntry> logAt(const std::vector<SimTime>& departures) {
  std::vector<PacketLogEntry> log;
  PacketNumber pn = 0;
  for (auto t : departures) {
    log.push_back(PacketLogEntry{pn++, 1500, t, t, false});
  }
  return log;
}

std::vector<PacketLogEntry> logWithDiffs(const std::vector<SimTime>& diffs) {
  std::vector<PacketLogEntry> log;
  SimTime intended = kZeroTime;
  PacketNumber pn = 0;
  for (auto d : diffs) {
    log.push_back(PacketLogEntry{pn++, 1500, intended, intended + d, false});
    intended += 1ms;
  }
  return log;
}

TEST(Trains, WorkedExample) {
  const auto log = logAt({0us, 50us, 200us, 250us, 300us, 1000us});
  EXPECT_EQ(extractTrains(log).lengths, (std::vector<std::uint32_t>{2, 3, 1}));
}

TEST(Trains, SinglePacket) {
  EXPECT_EQ(extractTrains(logAt({5ms})).lengths, std::vector<std::uint32_t>{1});
}

TEST(Trains, EmptyLog) {
  const auto stats = extractTrains({});
  EXPECT_TRUE(stats.lengths.empty());
  EXPECT_EQ(stats.packetCount(), 0u);
}

TEST(Trains, GapEqualToThresholdSplitsUnlessInclusive) {
  const auto log = logAt({0us, 100us, 200us, 300us});
  EXPECT_EQ(extractTrains(log).lengths, (std::vector<std::uint32_t>{1, 1, 1, 1}));
  TrainOptions inclusive;
  inclusive.inclusive = true;
  EXPECT_EQ(extractTrains(log, inclusive).lengths, std::vector<std::uint32_t>{4});
}

TEST(Trains, DroppedEntriesAreSkipped) {
  auto log = logAt({0us, 50us, 500us, 100us});
  log[2].dropped = true;
  EXPECT_EQ(extractTrains(log).lengths, std::vector<std::uint32_t>{3});
}

TEST(Trains, UnsortedLogIsRejected) {
  EXPECT_THROW(extractTrains(logAt({1ms, 0ms})), std::invalid_argument);
}

// Independent splitter: a train is a maximal [start, end] whose inner gaps are
// all below the threshold, found by scanning both directions from every packet.
std::vector<std::uint32_t> bruteForceTrains(const std::vector<SimTime>& t, SimTime threshold) {
  const auto n = t.size();
  std::set<std::pair<std::size_t, std::size_t>> trains;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t start = i;
    while (start > 0 && t[start] - t[start - 1] < threshold) {
      --start;
    }
    std::size_t end = i;
    while (end + 1 < n && t[end + 1] - t[end] < threshold) {
      ++end;
    }
    trains.emplace(start, end);
  }
  std::vector<std::uint32_t> lengths;
  for (const auto& [start, end] : trains) {
    lengths.push_back(static_cast<std::uint32_t>(end - start + 1));
  }
  return lengths;
}

TEST(TrainsProperty, MatchesBruteForceSplitter) {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    RngStream rng(seed, "log");
    const auto n = 1 + rng.next() % 1000;
    std::vector<SimTime> kept;
    std::vector<PacketLogEntry> log;
    SimTime now = kZeroTime;
    for (std::uint64_t i = 0; i < n; ++i) {
      // Gaps cluster around the threshold, including exact hits and zeros.
      const auto pick = rng.next() % 4;
      const SimTime gap = pick == 0 ? 100us
          : pick == 1 ? kZeroTime
                      : SimTime{static_cast<std::int64_t>(rng.next() % 250'000)};
      now += gap;
      const bool dropped = rng.uniform() < 0.05;
      log.push_back(PacketLogEntry{i, 1500, now, now, dropped});
      if (!dropped) {
        kept.push_back(now);
      }
    }
    const auto stats = extractTrains(log);
    ASSERT_EQ(stats.lengths, bruteForceTrains(kept, 100us)) << "seed " << seed;
    std::uint64_t weighted = 0;
    for (const auto& [length, count] : stats.histogram) {
      weighted += length * count;
    }
    ASSERT_EQ(weighted, kept.size());
    const auto cdf = packetsPerTrainCdf(stats);
    if (!cdf.empty()) {
      ASSERT_EQ(cdf.back().cumulativeFraction, 1.0);
      for (std::size_t i = 1; i < cdf.size(); ++i) {
        ASSERT_GE(cdf[i].cumulativeFraction, cdf[i - 1].cumulativeFraction);
      }
    }
    ASSERT_EQ(interPacketGaps(log).size(), kept.empty() ? 0 : kept.size() - 1);
  }
}

TEST(Cdf, WorkedExample) {
  const auto cdf = packetsPerTrainCdf(extractTrains(logAt({0us, 50us, 200us, 250us, 300us, 1000us})));
  ASSERT_EQ(cdf.size(), 3u);
  EXPECT_EQ(cdf[0].length, 1u);
  EXPECT_DOUBLE_EQ(cdf[0].cumulativeFraction, 1.0 / 6);
  EXPECT_DOUBLE_EQ(cdf[1].cumulativeFraction, 3.0 / 6);
  EXPECT_EQ(cdf[2].cumulativeFraction, 1.0);
}

TEST(Cdf, AllSingletonsReachOneAtLengthOne) {
  const auto cdf = packetsPerTrainCdf(extractTrains(logAt({0ms, 1ms, 2ms})));
  ASSERT_EQ(cdf.size(), 1u);
  EXPECT_EQ(cdf[0].length, 1u);
  EXPECT_EQ(cdf[0].cumulativeFraction, 1.0);
}

TEST(Cdf, SeventeenPacketTrainAmongSingletons) {
  std::vector<SimTime> t;
  SimTime now = kZeroTime;
  for (int i = 0; i < 26; ++i) {
    t.push_back(now);
    now += 1ms;
  }
  for (int i = 0; i < 17; ++i) {
    t.push_back(now);
    now += 12us;
  }
  const auto cdf = packetsPerTrainCdf(extractTrains(logAt(t)));
  ASSERT_EQ(cdf.size(), 2u);
  EXPECT_EQ(cdf[1].length, 17u);
  EXPECT_NEAR(cdf[1].cumulativeFraction - cdf[0].cumulativeFraction, 17.0 / 43, 1e-12);
}

TEST(Precision, WorkedExample) {
  const auto value = precision(logWithDiffs({0us, 200us, 400us}));
  ASSERT_TRUE(value.has_value());
  EXPECT_NEAR(*value, 163299.3, 0.1);
}

TEST(Precision, ConstantOffsetIsZero) {
  EXPECT_EQ(*precision(logWithDiffs({100us, 100us, 100us, 100us})), 0.0);
}

TEST(Precision, NeedsTwoSamples) {
  EXPECT_FALSE(precision(logWithDiffs({100us})).has_value());
  auto log = logWithDiffs({0us, 5ms});
  log[1].dropped = true;
  EXPECT_FALSE(precision(log).has_value());
  log[1].dropped = false;
  log[1].intendedTxTime.reset();
  EXPECT_FALSE(precision(log).has_value());
}

TEST(PrecisionProperty, InvariantUnderClockOffset) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RngStream rng(seed, "offset");
    std::vector<SimTime> diffs;
    for (int i = 0; i < 500; ++i) {
      diffs.push_back(SimTime{static_cast<std::int64_t>(rng.next() % 2'000'000)});
    }
    auto log = logWithDiffs(diffs);
    const double base = *precision(log);
    const SimTime offset{static_cast<std::int64_t>(rng.next() % 1'000'000'000'000'000)};
    for (auto& e : log) {
      e.departureTime += offset;
    }
    ASSERT_NEAR(*precision(log), base, 1e-6) << "seed " << seed;
  }
}

TEST(Summarize, SampleStandardDeviation) {
  const std::vector<double> drops{10, 20, 30};
  const auto s = summarize(drops);
  EXPECT_DOUBLE_EQ(s.mean, 20.0);
  EXPECT_DOUBLE_EQ(s.stddev, 10.0);
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.format(), "20.00 ± 10.00");
}

TEST(Summarize, SingleRunHasZeroSpread) {
  const std::vector<double> one{687.15};
  EXPECT_EQ(summarize(one).stddev, 0.0);
}

TEST(Summarize, IdenticalRunsHaveZeroSpread) {
  const std::vector<double> same(20, 34.67);
  const auto s = summarize(same);
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_EQ(s.count, 20u);
}

TEST(Summarize, FormatsLikeTheTables) {
  MetricSummary s;
  s.mean = 687.15;
  s.stddev = 338.12;
  EXPECT_EQ(s.format(), "687.15 ± 338.12");
}

TEST(Csv, IpgHeaderAndIntegerNanoseconds) {
  const std::vector<SimTime> gaps{300us, 12us};
  EXPECT_EQ(ipgCsv(gaps), "gap_ns\n300000\n12000\n");
}

TEST(Csv, TrainsInAscendingLength) {
  const auto stats = extractTrains(logAt({0us, 50us, 200us, 250us, 300us, 1000us}));
  EXPECT_EQ(trainsCsv(stats), "length,train_count,packet_count\n1,1,1\n2,1,2\n3,1,3\n");
}

TEST(Csv, MetricsLeaveAbsentValuesEmpty) {
  const std::vector<RunMetrics> runs{
      {0, 34.67e6, 12, 270000.4},
      {1, std::nullopt, 3, std::nullopt},
  };
  EXPECT_EQ(
      metricsCsv(runs),
      "run_id,goodput_bps,drops,precision_ns\n0,34670000,12,270000\n1,,3,\n");
}

TEST(Csv, CwndPhaseNames) {
  const std::vector<CwndSample> samples{
      {1ms, 15000, 15000, 468750.0, CongestionPhase::kSlowStart},
      {2ms, 30000, 21000, 937500.4, CongestionPhase::kRecovery},
  };
  EXPECT_EQ(
      cwndCsv(samples),
      "time_ns,cwnd_bytes,pacing_rate_Bps,phase\n"
      "1000000,15000,468750,SLOW_START\n"
      "2000000,30000,937500,RECOVERY\n");
}

TEST(Csv, SummaryRow) {
  const std::vector<double> drops{10, 20, 30};
  const std::vector<NamedSummary> rows{{"drops", summarize(drops)}};
  EXPECT_EQ(
      summaryCsv(rows),
      "metric,mean,std,n,formatted\ndrops,20.000000,10.000000,3,20.00 ± 10.00\n");
}

} // namespace
} // namespace pacesim

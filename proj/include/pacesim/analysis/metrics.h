#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacesim/cca/congestion_controller.h"
#include "pacesim/sim/time.h"
#include "pacesim/transport/packet.h"

namespace pacesim {

// One data packet as seen by the tap in front of the bottleneck.
struct PacketLogEntry {
  PacketNumber packetNumber{0};
  std::uint32_t size{0};
  std::optional<SimTime> intendedTxTime;
  SimTime departureTime{kZeroTime};
  // Never reached the wire (dropped by the host qdisc).
  bool dropped{false};
};

// Congestion controller state after an ACK or loss event.
struct CwndSample {
  SimTime time{kZeroTime};
  std::uint64_t cwnd{0};
  std::uint64_t ssthresh{0};
  double pacingRate{0.0};
  CongestionPhase phase{CongestionPhase::kSlowStart};
};

struct TrainOptions {
  SimTime threshold{100us};
  // Gaps equal to the threshold split trains unless this is set.
  bool inclusive{false};

  bool operator==(const TrainOptions&) const = default;
};

struct TrainStats {
  SimTime threshold{100us};
  // Train lengths in wire order.
  std::vector<std::uint32_t> lengths;
  // length -> number of trains of that length.
  std::map<std::uint32_t, std::uint64_t> histogram;

  std::uint64_t packetCount() const;
  std::uint64_t trainCount() const noexcept {
    return lengths.size();
  }
  // Fraction of packets that sit in trains satisfying min <= length <= max.
  double packetFraction(std::uint32_t minLength, std::uint32_t maxLength) const;
};

// Maximal runs of consecutive packets whose adjacent gaps are below the
// threshold. Dropped entries are skipped. Requires departure order.
TrainStats extractTrains(std::span<const PacketLogEntry> log, const TrainOptions& options = {});

struct CdfPoint {
  std::uint32_t length{0};
  double cumulativeFraction{0.0};
};

// x: train length, y: fraction of packets in trains no longer than x. The
// final point is exactly 1.0.
std::vector<CdfPoint> packetsPerTrainCdf(const TrainStats& stats);

std::vector<SimTime> interPacketGaps(std::span<const PacketLogEntry> log);

// Population standard deviation of (departure - intended) in ns over
// non-dropped entries with an intended time. Empty below two samples.
std::optional<double> precision(std::span<const PacketLogEntry> log);

struct RunMetrics {
  std::uint64_t runId{0};
  std::optional<double> goodputBps;
  std::uint64_t droppedPackets{0};
  std::optional<double> precisionNs;
};

struct MetricSummary {
  double mean{0.0};
  // Sample standard deviation (n - 1); zero for a single value.
  double stddev{0.0};
  std::size_t count{0};

  // "mean ± std" with two decimals.
  std::string format() const;
};

MetricSummary summarize(std::span<const double> values);

} // namespace pacesim

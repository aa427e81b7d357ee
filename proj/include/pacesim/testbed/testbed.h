#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pacesim/analysis/metrics.h"
#include "pacesim/cca/congestion_controller.h"
#include "pacesim/testbed/run_config.h"

namespace pacesim {

struct RunResult {
  std::uint64_t seed{0};
  bool complete{false};
  std::optional<double> goodputBps;
  SimTime completionTime{kZeroTime};

  // Data packets handed to the host stack, including retransmissions.
  std::uint64_t dataPacketsSent{0};
  std::uint64_t dataPacketsDelivered{0};
  std::uint64_t bottleneckDrops{0};
  std::uint64_t qdiscDrops{0};
  // Data packets still inside the host or the path when the run ended.
  std::uint64_t dataPacketsInFlight{0};
  std::uint64_t retransmissions{0};
  std::uint64_t uniquePayloadDelivered{0};
  std::uint64_t ptoCount{0};

  std::optional<double> precisionNs;
  // Data packets at the bottleneck ingress tap, in departure order.
  std::vector<PacketLogEntry> packetLog;
  std::vector<CwndSample> cwndTrace;
  std::vector<CcaEventRecord> ccaEvents;
  std::uint64_t rollbacks{0};

  std::optional<CcaEventRecord> slowStartExit;
  std::optional<SimTime> slowStartEpochEnd;
  // Bottleneck drops of packets that hit the wire before the slow-start
  // epoch ended.
  std::uint64_t slowStartEpochDrops{0};
};

// Runs one transfer to completion (or the time limit) and collects metrics.
// Deterministic in (config, seed).
RunResult runSimulation(const RunConfig& config, std::uint64_t seed);

// A packet handed to a host qdisc at `enqueueAt` carrying `txtime`.
struct ScriptedSend {
  SimTime enqueueAt{kZeroTime};
  SimTime txtime{kZeroTime};
};

struct QdiscReplayResult {
  std::uint64_t drops{0};
  std::vector<PacketLogEntry> log;
};

// Feeds a fixed enqueue trace of timestamped 1500 B packets through one qdisc
// and the NIC, without a transport around it.
QdiscReplayResult replayThroughQdisc(
    QdiscKind kind,
    const EtfConfig& etf,
    const FqConfig& fq,
    const NicModel& nic,
    std::span<const ScriptedSend> trace,
    std::uint64_t seed);

} // namespace pacesim

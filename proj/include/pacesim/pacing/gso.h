#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pacesim/sim/time.h"
#include "pacesim/transport/packet.h"

namespace pacesim {

enum class GsoMode : std::uint8_t { kBurst, kPaced };

std::string_view toString(GsoMode mode);
std::optional<GsoMode> gsoModeFromString(std::string_view name);

struct GsoConfig {
  bool enabled{false};
  std::uint32_t segmentSize{1500};
  std::uint32_t maxSegments{16};
  GsoMode mode{GsoMode::kBurst};
  // Sender-side batching: with data in flight, a buffer is only formed once
  // min(max_segments, cwnd_packets / divisor) segments fit. Zero sends
  // whatever fits at once.
  std::uint32_t batchCwndDivisor{4};

  bool operator==(const GsoConfig&) const = default;
};

struct TimedSegment {
  Packet packet;
  SimTime release;
};

// Splits one GSO buffer into wire segments with release times. BURST releases
// every segment at `now`; PACED spaces segment i by i * segment_size / rate,
// using the rate snapshotted when the buffer was formed. Throws
// std::invalid_argument for an empty or oversized buffer.
std::vector<TimedSegment> gsoEmit(
    std::span<const Packet> segments,
    const GsoConfig& config,
    double bufferPacingRate,
    SimTime now);

} // namespace pacesim

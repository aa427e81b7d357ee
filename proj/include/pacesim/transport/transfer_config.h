#pragma once

#include <cstdint>

#include "pacesim/sim/time.h"

namespace pacesim {

struct TransferConfig {
  std::uint64_t objectSize{100ULL * 1024 * 1024};
  // Full datagram size on the wire; congestion windows count these bytes.
  std::uint32_t mss{1500};
  // Per-packet overhead (IP/UDP/QUIC headers); payload = mss - headerBytes.
  std::uint32_t headerBytes{48};
  std::uint32_t ackPacketSize{64};
  std::uint32_t ackEveryN{2};
  SimTime maxAckDelay{25ms};
  std::uint32_t lossPacketThreshold{3};
  // Time threshold as a fraction of max(smoothed, latest) RTT.
  std::uint32_t lossTimeNumerator{9};
  std::uint32_t lossTimeDenominator{8};
  // Most recent ACK ranges carried per ACK frame; 0 means unlimited.
  std::uint32_t maxAckRanges{64};

  std::uint32_t payloadPerPacket() const noexcept {
    return mss - headerBytes;
  }

  bool operator==(const TransferConfig&) const = default;
};

} // namespace pacesim

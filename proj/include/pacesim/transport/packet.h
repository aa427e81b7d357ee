#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pacesim/sim/time.h"

namespace pacesim {

using PacketNumber = std::uint64_t;

enum class PacketKind : std::uint8_t { kData, kAck };

// Inclusive range of packet numbers.
struct AckRange {
  PacketNumber smallest{0};
  PacketNumber largest{0};

  bool contains(PacketNumber pn) const noexcept {
    return pn >= smallest && pn <= largest;
  }
  bool operator==(const AckRange&) const = default;
};

struct AckInfo {
  PacketNumber largestAcked{0};
  // Disjoint, sorted descending, all <= largestAcked.
  std::vector<AckRange> ranges;
  SimTime ackDelay{kZeroTime};
};

// A contiguous slice of the transferred object.
struct StreamRange {
  std::uint64_t offset{0};
  std::uint32_t length{0};

  std::uint64_t end() const noexcept {
    return offset + length;
  }
  bool operator==(const StreamRange&) const = default;
};

struct Packet {
  PacketNumber packetNumber{0};
  std::uint32_t size{0};
  PacketKind kind{PacketKind::kData};
  // Target send time chosen by the pacer. Logged for precision analysis.
  std::optional<SimTime> intendedTxTime;
  // Whether intendedTxTime is handed to the kernel (SO_TXTIME style) for a
  // timestamp-honoring qdisc to enforce.
  bool txtimeAttached{false};
  // Time the packet left the sender host onto the wire.
  SimTime actualTxTime{kZeroTime};
  bool isRetransmission{false};
  std::optional<AckInfo> carriedAck;
  StreamRange payload;
};

} // namespace pacesim

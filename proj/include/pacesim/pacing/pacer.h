#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "pacesim/pacing/leaky_bucket.h"
#include "pacesim/sim/rng.h"
#include "pacesim/sim/time.h"
#include "pacesim/transport/packet.h"

namespace pacesim {

enum class PacerStrategy : std::uint8_t {
  // Stamp each packet with a send time and hand it down at once; a
  // timestamp-honoring qdisc enforces the spacing.
  kTimestamp,
  // Hold each packet in the sender until its computed send time.
  kInterval,
  // Credit-based pacing: bursts up to the bucket capacity, then the leak rate.
  kLeakyBucket,
  kNone,
};

std::string_view toString(PacerStrategy strategy);
std::optional<PacerStrategy> pacerStrategyFromString(std::string_view name);

struct PacerConfig {
  PacerStrategy strategy{PacerStrategy::kInterval};
  std::uint32_t bucketCapacityPackets{16};
  // Wakeup inaccuracy of user-space timers for strategies that hold packets.
  JitterModel releaseJitter;

  bool attachesTxtime() const noexcept {
    return strategy == PacerStrategy::kTimestamp;
  }
  bool holdsPackets() const noexcept {
    return strategy == PacerStrategy::kInterval ||
        strategy == PacerStrategy::kLeakyBucket;
  }
  bool operator==(const PacerConfig&) const = default;
};

// Spacing chain shared by the timestamp and interval pacers: each send is
// placed one interval after the previous one, or at the time the sender
// became ready if that is later (which resets the chain after idle).
class SpacingChain {
 public:
  SimTime nextSlot(SimTime readySince) const noexcept {
    return std::max(readySince, nextAllowed_);
  }
  // Books `bytes` at rate `bytesPerSecond` and returns the slot used.
  SimTime book(std::uint32_t bytes, double bytesPerSecond, SimTime readySince);

 private:
  SimTime nextAllowed_{kZeroTime};
};

// Stamps intendedTxTime = max(now, previous + previous size / rate) and marks
// the timestamp for the kernel. The packet is passed down immediately.
class TimestampPacer {
 public:
  void pace(Packet& packet, double bytesPerSecond, SimTime now);

 private:
  SpacingChain chain_;
};

// Same spacing arithmetic, but the sender itself waits for the returned time.
class IntervalPacer {
 public:
  SimTime pace(Packet& packet, double bytesPerSecond, SimTime now);

 private:
  SpacingChain chain_;
};

struct PacedSend {
  SimTime intended{kZeroTime};
  bool attachTxtime{false};
};

// Sender-facing pacer covering all strategies with a two-step protocol: ask
// when the next `bytes` may leave, then commit once they actually leave.
class Pacer {
 public:
  Pacer(const PacerConfig& config, std::uint32_t mss);

  // Earliest release time for the next `bytes`; <= now means send now.
  SimTime releaseTime(
      std::uint32_t bytes,
      double bytesPerSecond,
      SimTime readySince,
      SimTime now);

  // `scheduled` is the release time returned earlier (or now if none).
  PacedSend commit(
      std::uint32_t bytes,
      double bytesPerSecond,
      SimTime readySince,
      SimTime scheduled,
      SimTime now);

  const PacerConfig& config() const noexcept {
    return config_;
  }
  const LeakyBucket& bucket() const noexcept {
    return bucket_;
  }

 private:
  PacerConfig config_;
  SpacingChain chain_;
  LeakyBucket bucket_;
};

} // namespace pacesim

#pragma once

#include <cstdint>
#include <variant>

#include "pacesim/sim/time.h"

namespace pacesim {

struct SendNow {};
struct WaitUntil {
  SimTime time;
};
using Admission = std::variant<SendNow, WaitUntil>;

// Credit bucket: `level` bytes of credit refill at `leakRate` up to
// `capacity`. A full bucket admits capacity / size packets back to back.
class LeakyBucket {
 public:
  LeakyBucket() = default;
  LeakyBucket(std::uint64_t capacityBytes, double leakRate, SimTime now);

  // Deducts and returns SendNow if enough credit, else the time it will be.
  Admission admit(std::uint32_t bytes, SimTime now);
  // Same decision without consuming credit.
  Admission peek(std::uint32_t bytes, SimTime now);

  // Credit accrued so far is settled at the old rate first.
  void setLeakRate(double bytesPerSecond, SimTime now);

  double level() const noexcept {
    return level_;
  }
  std::uint64_t capacity() const noexcept {
    return capacity_;
  }
  double leakRate() const noexcept {
    return leakRate_;
  }
  std::uint64_t bytesAdmitted() const noexcept {
    return admitted_;
  }

 private:
  void refill(SimTime now);
  SimTime creditTime(std::uint32_t bytes, SimTime now) const;

  std::uint64_t capacity_{0};
  double level_{0.0};
  double leakRate_{0.0};
  SimTime lastUpdate_{kZeroTime};
  std::uint64_t admitted_{0};
};

} // namespace pacesim

#include "pacesim/pacing/leaky_bucket.h"

#include <algorithm>
#include <cmath>

namespace pacesim {

LeakyBucket::LeakyBucket(std::uint64_t capacityBytes, double leakRate, SimTime now)
    : capacity_(capacityBytes),
      level_(static_cast<double>(capacityBytes)),
      leakRate_(leakRate),
      lastUpdate_(now) {}

void LeakyBucket::refill(SimTime now) {
  if (now <= lastUpdate_) {
    return;
  }
  level_ = std::min(
      static_cast<double>(capacity_),
      level_ + leakRate_ * toSeconds(now - lastUpdate_));
  lastUpdate_ = now;
}

void LeakyBucket::setLeakRate(double bytesPerSecond, SimTime now) {
  refill(now);
  leakRate_ = bytesPerSecond;
}

SimTime LeakyBucket::creditTime(std::uint32_t bytes, SimTime now) const {
  const double missing = static_cast<double>(bytes) - level_;
  // Round up so the bucket is guaranteed to hold `bytes` at the returned time.
  return now + SimTime{static_cast<std::int64_t>(std::ceil(missing * 1e9 / leakRate_))};
}

Admission LeakyBucket::peek(std::uint32_t bytes, SimTime now) {
  refill(now);
  if (level_ >= static_cast<double>(bytes)) {
    return SendNow{};
  }
  return WaitUntil{creditTime(bytes, now)};
}

Admission LeakyBucket::admit(std::uint32_t bytes, SimTime now) {
  auto decision = peek(bytes, now);
  if (std::holds_alternative<SendNow>(decision)) {
    level_ -= static_cast<double>(bytes);
    admitted_ += bytes;
  }
  return decision;
}

} // namespace pacesim

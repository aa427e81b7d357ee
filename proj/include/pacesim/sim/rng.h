#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "pacesim/sim/time.h"

namespace pacesim {

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

// Deterministic random stream. Each component derives its own sub-stream from
// the run seed and a stable name, so adding draws in one component never
// shifts the sequence seen by another.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view name);

  RngStream substream(std::string_view name) const {
    return RngStream(seed_, name);
  }

  std::uint64_t seed() const noexcept {
    return seed_;
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double standardNormal() {
    return normal_(engine_);
  }

  std::uint64_t next() {
    return engine_();
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Timing noise added to a timer or scheduler wakeup: a normal delay with the
// given mean and standard deviation, truncated at zero. A zero stddev and mean
// disables it. The default mean of three standard deviations keeps truncation
// below 0.2% so the sample spread equals `stddev`.
struct JitterModel {
  SimTime mean{kZeroTime};
  SimTime stddev{kZeroTime};

  static JitterModel none() {
    return {};
  }
  static JitterModel normal(SimTime stddev) {
    return {3 * stddev, stddev};
  }

  bool enabled() const noexcept {
    return mean > kZeroTime || stddev > kZeroTime;
  }

  SimTime sample(RngStream& rng) const;

  bool operator==(const JitterModel&) const = default;
};

} // namespace pacesim

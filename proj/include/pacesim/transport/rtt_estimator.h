#pragma once

#include <optional>

#include "pacesim/sim/time.h"

namespace pacesim {

// Smoothed RTT with 7/8 / 1/8 weighting and a 3/4 / 1/4 variance filter.
class RttEstimator {
 public:
  RttEstimator() = default;
  explicit RttEstimator(SimTime initialRtt) {
    update(initialRtt, kZeroTime);
  }

  // Returns the sample after ack-delay adjustment.
  SimTime update(SimTime latestRtt, SimTime ackDelay);

  bool hasSample() const noexcept {
    return hasSample_;
  }
  SimTime smoothed() const noexcept {
    return smoothed_;
  }
  SimTime variance() const noexcept {
    return variance_;
  }
  SimTime minRtt() const noexcept {
    return minRtt_;
  }
  SimTime latest() const noexcept {
    return latest_;
  }

 private:
  bool hasSample_{false};
  SimTime smoothed_{kZeroTime};
  SimTime variance_{kZeroTime};
  SimTime minRtt_{kInfiniteTime};
  SimTime latest_{kZeroTime};
};

} // namespace pacesim

#include "pacesim/transport/rtt_estimator.h"

#include <algorithm>

namespace pacesim {

SimTime RttEstimator::update(SimTime latestRtt, SimTime ackDelay) {
  minRtt_ = std::min(minRtt_, latestRtt);
  SimTime adjusted = latestRtt;
  // Never let the ack delay pull a sample below the path minimum.
  if (latestRtt - ackDelay >= minRtt_) {
    adjusted = latestRtt - ackDelay;
  }
  latest_ = adjusted;
  if (!hasSample_) {
    hasSample_ = true;
    smoothed_ = adjusted;
    variance_ = adjusted / 2;
    return adjusted;
  }
  const SimTime deviation =
      smoothed_ > adjusted ? smoothed_ - adjusted : adjusted - smoothed_;
  variance_ = (3 * variance_ + deviation) / 4;
  smoothed_ = (7 * smoothed_ + adjusted) / 8;
  return adjusted;
}

} // namespace pacesim

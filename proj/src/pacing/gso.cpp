#include "pacesim/pacing/gso.h"

#include <cmath>
#include <stdexcept>

namespace pacesim {

std::string_view toString(GsoMode mode) {
  return mode == GsoMode::kBurst ? "BURST" : "PACED";
}

std::optional<GsoMode> gsoModeFromString(std::string_view name) {
  if (name == "BURST") {
    return GsoMode::kBurst;
  }
  if (name == "PACED") {
    return GsoMode::kPaced;
  }
  return std::nullopt;
}

std::vector<TimedSegment> gsoEmit(
    std::span<const Packet> segments,
    const GsoConfig& config,
    double bufferPacingRate,
    SimTime now) {
  if (segments.empty()) {
    throw std::invalid_argument("GSO buffer must contain at least one segment");
  }
  if (segments.size() > config.maxSegments) {
    throw std::invalid_argument("GSO buffer exceeds max_segments");
  }
  if (config.mode == GsoMode::kPaced && !(bufferPacingRate > 0.0)) {
    throw std::invalid_argument("paced GSO needs a positive buffer pacing rate");
  }
  std::vector<TimedSegment> out;
  out.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    SimTime release = now;
    if (config.mode == GsoMode::kPaced) {
      // Computed per index rather than accumulated, so rounding never drifts.
      release += SimTime{std::llround(
          static_cast<double>(i) * config.segmentSize * 1e9 / bufferPacingRate)};
    }
    out.push_back(TimedSegment{segments[i], release});
  }
  return out;
}

} // namespace pacesim

#include "pacesim/testbed/run_config.h"

#include "pacesim/cca/bbr.h"
#include "pacesim/cca/window_controller.h"

namespace pacesim {

std::string_view toString(CcaKind kind) {
  switch (kind) {
    case CcaKind::kCubic:
      return "CUBIC";
    case CcaKind::kReno:
      return "RENO";
    case CcaKind::kBbr:
      return "BBR";
  }
  return "UNKNOWN";
}

std::optional<CcaKind> ccaKindFromString(std::string_view name) {
  for (auto k : {CcaKind::kCubic, CcaKind::kReno, CcaKind::kBbr}) {
    if (toString(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

std::unique_ptr<CongestionController> makeController(
    const CcaConfig& config,
    std::uint32_t mss,
    SimTime initialRtt) {
  WindowControllerConfig window;
  window.mss = mss;
  window.initialWindowPackets = config.initialWindowPackets;
  window.pacingGain = config.pacingGain;
  window.hystart.enabled = config.hystartEnabled;
  window.initialRtt = initialRtt;
  switch (config.kind) {
    case CcaKind::kCubic: {
      CubicConfig cubic;
      cubic.window = window;
      cubic.rollbackEnabled = config.rollbackEnabled;
      cubic.spuriousThreshold = config.spuriousThreshold;
      return std::make_unique<Cubic>(cubic);
    }
    case CcaKind::kReno:
      return std::make_unique<NewReno>(window);
    case CcaKind::kBbr: {
      BbrConfig bbr;
      bbr.mss = mss;
      bbr.initialWindowPackets = config.initialWindowPackets;
      bbr.initialRtt = initialRtt;
      return std::make_unique<Bbr>(bbr);
    }
  }
  return nullptr;
}

std::string_view toString(AppPatternKind kind) {
  switch (kind) {
    case AppPatternKind::kContinuous:
      return "CONTINUOUS";
    case AppPatternKind::kIdleCycles:
      return "IDLE_CYCLES";
  }
  return "UNKNOWN";
}

std::optional<AppPatternKind> appPatternKindFromString(std::string_view name) {
  for (auto k : {AppPatternKind::kContinuous, AppPatternKind::kIdleCycles}) {
    if (toString(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

bool AppPattern::active(SimTime now) const noexcept {
  if (kind == AppPatternKind::kContinuous) {
    return true;
  }
  return now % (on + off) < on;
}

SimTime AppPattern::nextActive(SimTime now) const noexcept {
  if (kind == AppPatternKind::kContinuous) {
    return now;
  }
  const SimTime period = on + off;
  return (now / period + 1) * period;
}

} // namespace pacesim

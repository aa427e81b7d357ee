#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include "pacesim/cca/congestion_controller.h"
#include "pacesim/pacing/gso.h"
#include "pacesim/pacing/pacer.h"
#include "pacesim/qdisc/bottleneck.h"
#include "pacesim/qdisc/nic.h"
#include "pacesim/qdisc/qdisc.h"
#include "pacesim/transport/transfer_config.h"

namespace pacesim {

enum class CcaKind : std::uint8_t { kCubic, kReno, kBbr };

std::string_view toString(CcaKind kind);
std::optional<CcaKind> ccaKindFromString(std::string_view name);

struct CcaConfig {
  CcaKind kind{CcaKind::kCubic};
  bool rollbackEnabled{false};
  bool hystartEnabled{true};
  std::uint32_t spuriousThreshold{3};
  double pacingGain{1.25};
  std::uint32_t initialWindowPackets{10};

  bool operator==(const CcaConfig&) const = default;
};

std::unique_ptr<CongestionController> makeController(
    const CcaConfig& config,
    std::uint32_t mss,
    SimTime initialRtt);

enum class AppPatternKind : std::uint8_t { kContinuous, kIdleCycles };

std::string_view toString(AppPatternKind kind);
std::optional<AppPatternKind> appPatternKindFromString(std::string_view name);

// When the application has data to hand to the transport. IDLE_CYCLES
// alternates `on` periods of unlimited data with `off` periods of none,
// starting with an `on` period at time zero.
struct AppPattern {
  AppPatternKind kind{AppPatternKind::kContinuous};
  SimTime on{5ms};
  SimTime off{5ms};

  bool active(SimTime now) const noexcept;
  // Start of the next `on` period strictly after `now`.
  SimTime nextActive(SimTime now) const noexcept;

  bool operator==(const AppPattern&) const = default;
};

// Everything one simulated transfer needs except the seed.
struct RunConfig {
  TransferConfig transfer;
  CcaConfig cca;
  PacerConfig pacer;
  GsoConfig gso;
  QdiscKind qdisc{QdiscKind::kFifo};
  EtfConfig etf;
  FqConfig fq;
  NicModel nic;
  BottleneckConfig path;
  AppPattern app;
  // Runs still incomplete at this simulated time are reported as failed.
  SimTime timeLimit{600s};

  bool operator==(const RunConfig&) const = default;
};

} // namespace pacesim

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>

#include "pacesim/qdisc/nic.h"
#include "pacesim/sim/engine.h"
#include "pacesim/sim/rng.h"

namespace pacesim {

enum class QdiscKind : std::uint8_t { kNone, kFifo, kFq, kEtf };

std::string_view toString(QdiscKind kind);
std::optional<QdiscKind> qdiscKindFromString(std::string_view name);

struct EtfConfig {
  SimTime delta{200us};
  bool offload{false};
  bool operator==(const EtfConfig&) const = default;
};

struct FqConfig {
  // Timestamps further ahead than this are capped to now + horizon.
  std::optional<SimTime> horizon{10s};
  bool operator==(const FqConfig&) const = default;
};

// Host-side packet scheduler between the sender and the NIC.
class Qdisc {
 public:
  virtual ~Qdisc() = default;
  virtual void enqueue(Packet packet) = 0;
  virtual std::uint64_t drops() const noexcept {
    return 0;
  }
  virtual std::size_t backlog() const noexcept {
    return 0;
  }
};

// Hands packets straight to the NIC in arrival order (also used for "no qdisc").
class FifoQdisc final : public Qdisc {
 public:
  explicit FifoQdisc(EventEngine& engine, Nic& nic) : engine_(engine), nic_(nic) {}
  void enqueue(Packet packet) override;

 private:
  EventEngine& engine_;
  Nic& nic_;
};

// Earliest-departure-time scheduler: holds each packet until its timestamp,
// releases packets without one immediately, never drops.
class FqQdisc final : public Qdisc {
 public:
  FqQdisc(EventEngine& engine, Nic& nic, const FqConfig& config, RngStream rng);
  void enqueue(Packet packet) override;
  std::size_t backlog() const noexcept override {
    return queue_.size();
  }

 private:
  void service();
  void armWatchdog();

  EventEngine& engine_;
  Nic& nic_;
  FqConfig config_;
  RngStream rng_;
  // (eligibility time, arrival sequence) -> packet.
  std::map<std::pair<SimTime, std::uint64_t>, Packet> queue_;
  std::uint64_t arrivals_{0};
  std::optional<SimTime> armedFor_;
  std::uint64_t watchdogGeneration_{0};
};

// Earliest TxTime First: becomes active `delta` before each packet's txtime,
// drops packets whose txtime has passed, optionally defers the final hold to
// the NIC's launch-time feature. Offload on a NIC without launch time throws
// SimulationError at construction.
class EtfQdisc final : public Qdisc {
 public:
  using DropObserver = std::function<void(const Packet&)>;

  EtfQdisc(
      EventEngine& engine,
      Nic& nic,
      const EtfConfig& config,
      RngStream rng,
      DropObserver onDrop = {});
  // Throws SimulationError for a packet without an attached txtime.
  void enqueue(Packet packet) override;
  std::uint64_t drops() const noexcept override {
    return drops_;
  }
  std::size_t backlog() const noexcept override {
    return queue_.size();
  }

 private:
  void service();
  void armWatchdog();
  void drop(const Packet& packet);

  EventEngine& engine_;
  Nic& nic_;
  EtfConfig config_;
  RngStream rng_;
  DropObserver onDrop_;
  std::map<std::pair<SimTime, std::uint64_t>, Packet> queue_;
  std::uint64_t arrivals_{0};
  std::uint64_t drops_{0};
  std::optional<SimTime> armedFor_;
  std::uint64_t watchdogGeneration_{0};
};

} // namespace pacesim

#include "pacesim/qdisc/qdisc.h"

#include <algorithm>

namespace pacesim {

std::string_view toString(QdiscKind kind) {
  switch (kind) {
    case QdiscKind::kNone:
      return "NONE";
    case QdiscKind::kFifo:
      return "FIFO";
    case QdiscKind::kFq:
      return "FQ";
    case QdiscKind::kEtf:
      return "ETF";
  }
  return "UNKNOWN";
}

std::optional<QdiscKind> qdiscKindFromString(std::string_view name) {
  for (auto k : {QdiscKind::kNone, QdiscKind::kFifo, QdiscKind::kFq, QdiscKind::kEtf}) {
    if (toString(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

void FifoQdisc::enqueue(Packet packet) {
  nic_.transmit(std::move(packet), engine_.now());
}

FqQdisc::FqQdisc(EventEngine& engine, Nic& nic, const FqConfig& config, RngStream rng)
    : engine_(engine), nic_(nic), config_(config), rng_(std::move(rng)) {}

void FqQdisc::enqueue(Packet packet) {
  const SimTime now = engine_.now();
  SimTime eligible = now;
  if (packet.txtimeAttached && packet.intendedTxTime) {
    eligible = *packet.intendedTxTime;
    if (config_.horizon) {
      eligible = std::min(eligible, now + *config_.horizon);
    }
  }
  queue_.emplace(std::make_pair(eligible, arrivals_++), std::move(packet));
  service();
}

void FqQdisc::service() {
  const SimTime now = engine_.now();
  while (!queue_.empty() && queue_.begin()->first.first <= now) {
    auto node = queue_.extract(queue_.begin());
    nic_.transmit(std::move(node.mapped()), now + nic_.model().swDequeueJitter.sample(rng_));
  }
  armWatchdog();
}

void FqQdisc::armWatchdog() {
  if (queue_.empty()) {
    armedFor_.reset();
    return;
  }
  const SimTime head = queue_.begin()->first.first;
  if (armedFor_ && *armedFor_ <= head) {
    return;
  }
  armedFor_ = head;
  const auto generation = ++watchdogGeneration_;
  engine_.schedule(head, 0, EventKind::kTimerExpiry, [this, generation]() {
    if (generation != watchdogGeneration_) {
      return;
    }
    armedFor_.reset();
    service();
  });
}

EtfQdisc::EtfQdisc(
    EventEngine& engine,
    Nic& nic,
    const EtfConfig& config,
    RngStream rng,
    DropObserver onDrop)
    : engine_(engine),
      nic_(nic),
      config_(config),
      rng_(std::move(rng)),
      onDrop_(std::move(onDrop)) {
  if (config_.offload && !nic_.model().launchTimeEnabled) {
    throw SimulationError("ETF offload requires a NIC with launch time enabled");
  }
}

void EtfQdisc::drop(const Packet& packet) {
  ++drops_;
  if (onDrop_) {
    onDrop_(packet);
  }
}

void EtfQdisc::enqueue(Packet packet) {
  if (!packet.txtimeAttached || !packet.intendedTxTime) {
    throw SimulationError("ETF qdisc requires packets with an attached txtime");
  }
  if (*packet.intendedTxTime < engine_.now()) {
    drop(packet);
    return;
  }
  const SimTime txtime = *packet.intendedTxTime;
  queue_.emplace(std::make_pair(txtime, arrivals_++), std::move(packet));
  service();
}

void EtfQdisc::service() {
  const SimTime now = engine_.now();
  while (!queue_.empty() && queue_.begin()->first.first - config_.delta <= now) {
    auto node = queue_.extract(queue_.begin());
    Packet packet = std::move(node.mapped());
    const SimTime txtime = node.key().first;
    if (txtime < now) {
      drop(packet);
      continue;
    }
    const auto& jitter = config_.offload ? nic_.model().launchTimePrecisionJitter
                                         : nic_.model().etfSoftwareJitter;
    nic_.transmit(std::move(packet), txtime + jitter.sample(rng_));
  }
  armWatchdog();
}

void EtfQdisc::armWatchdog() {
  if (queue_.empty()) {
    armedFor_.reset();
    return;
  }
  const SimTime wake = queue_.begin()->first.first - config_.delta;
  if (armedFor_ && *armedFor_ <= wake) {
    return;
  }
  armedFor_ = wake;
  const auto generation = ++watchdogGeneration_;
  engine_.schedule(
      std::max(wake, engine_.now()), 0, EventKind::kTimerExpiry, [this, generation]() {
        if (generation != watchdogGeneration_) {
          return;
        }
        armedFor_.reset();
        service();
      });
}

} // namespace pacesim

#include "pacesim/testbed/testbed.h"

#include <algorithm>
#include <deque>
#include <memory>

#include "pacesim/cca/window_controller.h"
#include "pacesim/qdisc/bottleneck.h"
#include "pacesim/qdisc/nic.h"
#include "pacesim/qdisc/qdisc.h"
#include "pacesim/sim/engine.h"
#include "pacesim/transport/loss_detector.h"
#include "pacesim/transport/receiver.h"

namespace pacesim {
namespace {

enum Component : ComponentId {
  kSender = 1,
  kQdisc,
  kPath,
  kReceiver,
};

std::unique_ptr<Qdisc> makeQdisc(
    QdiscKind kind,
    EventEngine& engine,
    Nic& nic,
    const EtfConfig& etf,
    const FqConfig& fq,
    const RngStream& rng,
    EtfQdisc::DropObserver onDrop) {
  switch (kind) {
    case QdiscKind::kNone:
    case QdiscKind::kFifo:
      return std::make_unique<FifoQdisc>(engine, nic);
    case QdiscKind::kFq:
      return std::make_unique<FqQdisc>(engine, nic, fq, rng.substream("fq"));
    case QdiscKind::kEtf:
      return std::make_unique<EtfQdisc>(
          engine, nic, etf, rng.substream("etf"), std::move(onDrop));
  }
  return nullptr;
}

// One sender host, the emulated path and the receiver, wired through a shared
// engine. Lives for a single run.
class Simulation {
 public:
  Simulation(const RunConfig& config, std::uint64_t seed);
  RunResult run();

 private:
  // Sender.
  bool hasData() const noexcept;
  std::uint64_t packetsAvailable() const noexcept;
  std::optional<std::pair<StreamRange, bool>> takePayload();
  void trySend();
  std::uint32_t bufferSegments(std::uint64_t windowPackets) const;
  void sendBuffer(std::uint32_t segments, double rate, const PacedSend& paced);
  void handOff(Packet packet, SimTime release);
  void armReleaseTimer(SimTime at);
  void armAppWakeup(SimTime at);
  void onAck(const AckInfo& ack);
  void handleLosses(const std::vector<SentPacketRecord>& lost);
  void armRecoveryTimer();
  void onRecoveryTimer(std::uint64_t generation);
  void traceCwnd();
  void finish();

  // Path and receiver.
  void onWireDeparture(const Packet& packet);
  void onDataArrival(const Packet& packet);
  void sendAck(const AckInfo& ack);
  void armAckTimer();

  RunConfig config_;
  std::uint64_t seed_;
  EventEngine engine_;
  RngStream rng_;
  RngStream releaseRng_;

  Nic nic_;
  std::unique_ptr<Qdisc> qdisc_;
  TbfBottleneck bottleneck_;
  DelayLine reverse_;

  std::unique_ptr<CongestionController> cca_;
  LossDetector loss_;
  Pacer pacer_;
  Receiver receiver_;

  // Sender state.
  PacketNumber nextPacketNumber_{0};
  std::uint64_t nextOffset_{0};
  std::deque<StreamRange> retransmitQueue_;
  IntervalSet ackedPayload_;
  bool blocked_{true};
  SimTime readySince_{kZeroTime};
  std::optional<SimTime> releaseArmedFor_;
  std::optional<SimTime> releaseTarget_;
  std::uint64_t releaseGeneration_{0};
  bool appWakeupArmed_{false};
  std::uint64_t recoveryGeneration_{0};
  std::uint32_t ptoBackoff_{0};
  std::uint32_t probesPending_{0};
  SimTime lastSendTime_{kZeroTime};
  bool finished_{false};
  std::optional<SimTime> firstDataSent_;
  // Data bytes handed to the qdisc or release timers but not yet on the wire.
  std::uint64_t bytesInHost_{0};
  SimTime lastJitteredRelease_{kZeroTime};

  // Receiver state.
  bool ackTimerArmed_{false};

  RunResult result_;
  std::vector<SimTime> droppedWireTimes_;
};

Simulation::Simulation(const RunConfig& config, std::uint64_t seed)
    : config_(config),
      seed_(seed),
      rng_(seed, "run"),
      releaseRng_(rng_.substream("pacer-release")),
      nic_(
          engine_,
          config.nic,
          [this](Packet p) { onWireDeparture(p); },
          [this](Packet p) { bottleneck_.offer(std::move(p)); }),
      bottleneck_(
          engine_,
          config.path,
          [this](Packet p) { onDataArrival(p); },
          [this](const Packet& p) { droppedWireTimes_.push_back(p.actualTxTime); }),
      reverse_(
          engine_,
          config.path.oneWayDelayReverse,
          [this](Packet p) {
            if (p.carriedAck) {
              onAck(*p.carriedAck);
            }
          }),
      cca_(makeController(config.cca, config.transfer.mss, config.path.minRtt())),
      loss_(config.transfer, config.path.minRtt()),
      pacer_(config.pacer, config.transfer.mss),
      receiver_(config.transfer) {
  qdisc_ = makeQdisc(
      config.qdisc,
      engine_,
      nic_,
      config.etf,
      config.fq,
      rng_,
      [this](const Packet& p) {
        bytesInHost_ -= std::min<std::uint64_t>(bytesInHost_, p.size);
        result_.packetLog.push_back(
            PacketLogEntry{p.packetNumber, p.size, p.intendedTxTime, engine_.now(), true});
      });
}

bool Simulation::hasData() const noexcept {
  return !retransmitQueue_.empty() || nextOffset_ < config_.transfer.objectSize;
}

std::uint64_t Simulation::packetsAvailable() const noexcept {
  const std::uint64_t payload = config_.transfer.payloadPerPacket();
  const std::uint64_t remaining = config_.transfer.objectSize - nextOffset_;
  return retransmitQueue_.size() + (remaining + payload - 1) / payload;
}

std::optional<std::pair<StreamRange, bool>> Simulation::takePayload() {
  while (!retransmitQueue_.empty()) {
    const StreamRange range = retransmitQueue_.front();
    retransmitQueue_.pop_front();
    bool acked = true;
    // Skip ranges a later copy already delivered.
    const auto& intervals = ackedPayload_.intervals();
    auto it = intervals.upper_bound(range.offset);
    if (it == intervals.begin() || std::prev(it)->second < range.end()) {
      acked = false;
    }
    if (!acked) {
      return std::make_pair(range, true);
    }
  }
  if (nextOffset_ >= config_.transfer.objectSize) {
    return std::nullopt;
  }
  const auto length = static_cast<std::uint32_t>(std::min<std::uint64_t>(
      config_.transfer.payloadPerPacket(), config_.transfer.objectSize - nextOffset_));
  const StreamRange range{nextOffset_, length};
  nextOffset_ += length;
  return std::make_pair(range, false);
}

std::uint32_t Simulation::bufferSegments(std::uint64_t windowPackets) const {
  const auto& gso = config_.gso;
  std::uint64_t limit = gso.maxSegments;
  if (config_.pacer.strategy == PacerStrategy::kLeakyBucket) {
    limit = std::min<std::uint64_t>(limit, config_.pacer.bucketCapacityPackets);
  }
  return static_cast<std::uint32_t>(
      std::max<std::uint64_t>(1, std::min({limit, windowPackets, packetsAvailable()})));
}

void Simulation::trySend() {
  const std::uint32_t mss = config_.transfer.mss;
  while (!finished_) {
    const SimTime now = engine_.now();
    const bool probe = probesPending_ > 0;
    if (!hasData()) {
      blocked_ = true;
      return;
    }
    if (!probe && !config_.app.active(now)) {
      blocked_ = true;
      armAppWakeup(config_.app.nextActive(now));
      return;
    }
    const std::uint64_t cwnd = cca_->cwnd();
    const std::uint64_t inFlight = loss_.bytesInFlight();
    if (!probe && inFlight >= cwnd) {
      blocked_ = true;
      return;
    }
    std::uint32_t segments = 1;
    if (config_.gso.enabled && !probe) {
      const std::uint64_t windowPackets = (cwnd - inFlight + mss - 1) / mss;
      segments = bufferSegments(windowPackets);
      // Hold off until a useful batch fits, as a sender that drains its ACKs
      // before writing would.
      if (config_.gso.batchCwndDivisor > 0 && inFlight > 0) {
        const std::uint64_t target = std::min<std::uint64_t>(
            {config_.gso.maxSegments,
             std::max<std::uint64_t>(1, cwnd / mss / config_.gso.batchCwndDivisor),
             packetsAvailable()});
        if (segments < target) {
          blocked_ = true;
          return;
        }
      }
    }
    if (blocked_) {
      readySince_ = now;
      blocked_ = false;
    }
    const std::uint32_t bytes = segments * mss;
    const double rate = cca_->pacingRate();
    if (config_.pacer.holdsPackets()) {
      const SimTime release = pacer_.releaseTime(bytes, rate, readySince_, now);
      if (release > now) {
        armReleaseTimer(release);
        return;
      }
    }
    const SimTime scheduled = releaseTarget_.value_or(now);
    releaseTarget_.reset();
    const PacedSend paced = pacer_.commit(bytes, rate, readySince_, scheduled, now);
    if (probe) {
      --probesPending_;
    }
    sendBuffer(segments, rate, paced);
  }
}

void Simulation::sendBuffer(std::uint32_t segments, double rate, const PacedSend& paced) {
  const SimTime now = engine_.now();
  std::vector<Packet> buffer;
  buffer.reserve(segments);
  for (std::uint32_t i = 0; i < segments; ++i) {
    auto payload = takePayload();
    if (!payload) {
      break;
    }
    Packet packet;
    packet.packetNumber = nextPacketNumber_++;
    packet.size = payload->first.length + config_.transfer.headerBytes;
    packet.kind = PacketKind::kData;
    packet.isRetransmission = payload->second;
    packet.payload = payload->first;
    packet.intendedTxTime = paced.intended;
    packet.txtimeAttached = paced.attachTxtime;
    buffer.push_back(std::move(packet));
  }
  if (buffer.empty()) {
    return;
  }
  std::vector<TimedSegment> timed;
  if (config_.gso.enabled && buffer.size() > 1) {
    timed = gsoEmit(buffer, config_.gso, rate, paced.intended);
  } else {
    for (auto& p : buffer) {
      timed.push_back(TimedSegment{std::move(p), paced.intended});
    }
  }
  if (!firstDataSent_) {
    firstDataSent_ = now;
  }
  for (auto& [packet, release] : timed) {
    packet.intendedTxTime = release;
    if (config_.pacer.holdsPackets() && config_.pacer.releaseJitter.enabled()) {
      // User-space timer inaccuracy delays each release; the host still hands
      // packets down in order.
      release = std::max(
          release + config_.pacer.releaseJitter.sample(releaseRng_), lastJitteredRelease_);
      lastJitteredRelease_ = release;
    }
    SentPacketRecord record;
    record.packetNumber = packet.packetNumber;
    record.size = packet.size;
    record.payload = packet.payload;
    record.isRetransmission = packet.isRetransmission;
    loss_.onPacketSent(record, now);
    cca_->onPacketSent(now, packet.packetNumber, packet.size, loss_.bytesInFlight());
    ++result_.dataPacketsSent;
    if (packet.isRetransmission) {
      ++result_.retransmissions;
    }
    bytesInHost_ += packet.size;
    handOff(std::move(packet), release);
  }
  lastSendTime_ = now;
  armRecoveryTimer();
}

void Simulation::handOff(Packet packet, SimTime release) {
  // Attached timestamps are enforced downstream; otherwise the host releases
  // the segment into the qdisc at its own time.
  if (packet.txtimeAttached || release <= engine_.now()) {
    qdisc_->enqueue(std::move(packet));
    return;
  }
  engine_.schedule(release, kQdisc, EventKind::kTimerExpiry, [this, packet]() mutable {
    qdisc_->enqueue(std::move(packet));
  });
}

void Simulation::armReleaseTimer(SimTime at) {
  if (releaseArmedFor_ && *releaseArmedFor_ == at) {
    return;
  }
  releaseArmedFor_ = at;
  const auto generation = ++releaseGeneration_;
  engine_.schedule(at, kSender, EventKind::kTimerExpiry, [this, at, generation]() {
    if (generation != releaseGeneration_) {
      return;
    }
    releaseArmedFor_.reset();
    releaseTarget_ = at;
    trySend();
  });
}

void Simulation::armAppWakeup(SimTime at) {
  if (appWakeupArmed_) {
    return;
  }
  appWakeupArmed_ = true;
  engine_.schedule(at, kSender, EventKind::kAppWakeup, [this]() {
    appWakeupArmed_ = false;
    trySend();
  });
}

void Simulation::onAck(const AckInfo& ack) {
  if (finished_) {
    return;
  }
  const SimTime now = engine_.now();
  AckOutcome outcome = loss_.onAck(ack, now);
  for (const auto& record : outcome.acked) {
    ackedPayload_.insert(record.payload.offset, record.payload.end());
  }
  if (outcome.ackedBytes > 0) {
    ptoBackoff_ = 0;
    AckEvent event;
    event.now = now;
    event.ackedBytes = outcome.ackedBytes;
    event.largestAcked = ack.largestAcked;
    event.largestAckedSentTime = outcome.largestNewlyAckedSentTime.value_or(now);
    event.rttSample = outcome.rttSample;
    event.smoothedRtt = loss_.rtt().smoothed();
    event.minRtt = loss_.rtt().minRtt();
    event.deliveryRate = outcome.deliveryRate;
    event.bytesInFlight = loss_.bytesInFlight();
    event.bytesInHost = bytesInHost_;
    event.totalLost = loss_.totalLost();
    event.delivered = loss_.delivered();
    cca_->onAck(event);
  }
  handleLosses(outcome.lost);
  traceCwnd();
  armRecoveryTimer();
  trySend();
}

void Simulation::handleLosses(const std::vector<SentPacketRecord>& lost) {
  if (lost.empty()) {
    return;
  }
  LossEvent event;
  event.now = engine_.now();
  for (const auto& record : lost) {
    retransmitQueue_.push_back(record.payload);
    event.largestLostSentTime = std::max(event.largestLostSentTime, record.sentTime);
    ++event.lostCount;
    event.lostBytes += record.size;
  }
  event.totalLost = loss_.totalLost();
  event.bytesInFlight = loss_.bytesInFlight();
  cca_->onCongestionEvent(event);
}

void Simulation::armRecoveryTimer() {
  const auto generation = ++recoveryGeneration_;
  std::optional<SimTime> at = loss_.lossTime();
  if (!at && loss_.bytesInFlight() > 0) {
    const auto& rtt = loss_.rtt();
    const SimTime pto = rtt.smoothed() + std::max<SimTime>(4 * rtt.variance(), 1ms) +
        config_.transfer.maxAckDelay;
    at = lastSendTime_ + pto * (1LL << std::min<std::uint32_t>(ptoBackoff_, 16));
  }
  if (!at) {
    return;
  }
  engine_.schedule(
      std::max(*at, engine_.now()), kSender, EventKind::kTimerExpiry, [this, generation]() {
        onRecoveryTimer(generation);
      });
}

void Simulation::onRecoveryTimer(std::uint64_t generation) {
  if (generation != recoveryGeneration_ || finished_) {
    return;
  }
  if (loss_.lossTime()) {
    handleLosses(loss_.onLossTimeout(engine_.now()));
    traceCwnd();
  } else if (auto oldest = loss_.oldestOutstanding()) {
    // Probe timeout: resend the oldest outstanding data outside the window.
    ++ptoBackoff_;
    ++result_.ptoCount;
    retransmitQueue_.push_front(oldest->payload);
    probesPending_ = 1;
  }
  armRecoveryTimer();
  trySend();
}

void Simulation::traceCwnd() {
  const auto& state = cca_->state();
  result_.cwndTrace.push_back(CwndSample{
      engine_.now(), state.cwnd, state.ssthresh, state.pacingRate, state.phase});
}

void Simulation::finish() {
  finished_ = true;
  ++releaseGeneration_;
  ++recoveryGeneration_;
}

void Simulation::onWireDeparture(const Packet& packet) {
  if (packet.kind != PacketKind::kData) {
    return;
  }
  bytesInHost_ -= std::min<std::uint64_t>(bytesInHost_, packet.size);
  result_.packetLog.push_back(PacketLogEntry{
      packet.packetNumber, packet.size, packet.intendedTxTime, packet.actualTxTime, false});
}

void Simulation::onDataArrival(const Packet& packet) {
  const SimTime now = engine_.now();
  ++result_.dataPacketsDelivered;
  auto ack = receiver_.receiverStep(packet, now);
  if (!result_.complete && receiver_.complete()) {
    result_.complete = true;
    result_.completionTime = now;
    finish();
  }
  if (ack) {
    sendAck(*ack);
  } else {
    armAckTimer();
  }
}

void Simulation::armAckTimer() {
  const auto deadline = receiver_.ackDeadline();
  if (!deadline || ackTimerArmed_) {
    return;
  }
  ackTimerArmed_ = true;
  engine_.schedule(*deadline, kReceiver, EventKind::kTimerExpiry, [this]() {
    ackTimerArmed_ = false;
    if (auto ack = receiver_.onAckTimer(engine_.now())) {
      sendAck(*ack);
    }
    armAckTimer();
  });
}

void Simulation::sendAck(const AckInfo& ack) {
  Packet packet;
  packet.kind = PacketKind::kAck;
  packet.size = config_.transfer.ackPacketSize;
  packet.carriedAck = ack;
  reverse_.send(std::move(packet));
}

RunResult Simulation::run() {
  result_.seed = seed_;
  engine_.schedule(kZeroTime, kSender, EventKind::kAppWakeup, [this]() { trySend(); });
  engine_.runUntil(config_.timeLimit);
  if (!result_.complete) {
    finish();
  }

  result_.bottleneckDrops = bottleneck_.drops();
  result_.qdiscDrops = qdisc_->drops();
  const std::uint64_t accounted =
      result_.dataPacketsDelivered + result_.bottleneckDrops + result_.qdiscDrops;
  result_.dataPacketsInFlight =
      result_.dataPacketsSent >= accounted ? result_.dataPacketsSent - accounted : 0;
  result_.uniquePayloadDelivered = receiver_.uniquePayloadBytes();
  if (result_.complete && firstDataSent_ && receiver_.lastInOrderTime()) {
    result_.goodputBps = goodput(GoodputRecord{
        config_.transfer.objectSize, *firstDataSent_, *receiver_.lastInOrderTime(), true});
  }
  result_.precisionNs = precision(result_.packetLog);
  result_.ccaEvents = cca_->events();
  if (const auto* cubic = dynamic_cast<const Cubic*>(cca_.get())) {
    result_.rollbacks = cubic->rollbackCount();
  }
  result_.slowStartExit = cca_->slowStartExit();
  result_.slowStartEpochEnd = cca_->slowStartEpochEnd();
  const SimTime epochEnd = result_.slowStartEpochEnd.value_or(kInfiniteTime);
  result_.slowStartEpochDrops = static_cast<std::uint64_t>(std::count_if(
      droppedWireTimes_.begin(), droppedWireTimes_.end(), [epochEnd](SimTime t) {
        return t < epochEnd;
      }));
  return std::move(result_);
}

} // namespace

RunResult runSimulation(const RunConfig& config, std::uint64_t seed) {
  Simulation simulation(config, seed);
  return simulation.run();
}

QdiscReplayResult replayThroughQdisc(
    QdiscKind kind,
    const EtfConfig& etf,
    const FqConfig& fq,
    const NicModel& nicModel,
    std::span<const ScriptedSend> trace,
    std::uint64_t seed) {
  EventEngine engine;
  RngStream rng(seed, "replay");
  QdiscReplayResult result;
  Nic nic(
      engine,
      nicModel,
      [&result](Packet p) {
        result.log.push_back(
            PacketLogEntry{p.packetNumber, p.size, p.intendedTxTime, p.actualTxTime, false});
      },
      {});
  auto qdisc = makeQdisc(kind, engine, nic, etf, fq, rng, [&](const Packet& p) {
    result.log.push_back(
        PacketLogEntry{p.packetNumber, p.size, p.intendedTxTime, engine.now(), true});
  });
  PacketNumber pn = 0;
  for (const auto& send : trace) {
    Packet packet;
    packet.packetNumber = pn++;
    packet.size = 1500;
    packet.intendedTxTime = send.txtime;
    packet.txtimeAttached = true;
    engine.schedule(send.enqueueAt, kQdisc, EventKind::kPacketArrival, [&qdisc, packet]() {
      qdisc->enqueue(packet);
    });
  }
  engine.run();
  result.drops = qdisc->drops();
  return result;
}

} // namespace pacesim

#include "pacesim/scenario/presets.h"

#include <algorithm>
#include <cctype>

namespace pacesim {
namespace {

ScenarioConfig make(std::string name, std::string description) {
  ScenarioConfig s;
  s.name = std::move(name);
  s.description = std::move(description);
  return s;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c == '_' ? '-' : std::tolower(c));
  });
  return out;
}

// quiche-like sender: timestamps handed to an FQ qdisc, rollback off.
ScenarioConfig fqSender(std::string name, std::string description) {
  ScenarioConfig s = make(std::move(name), std::move(description));
  s.run.pacer.strategy = PacerStrategy::kTimestamp;
  s.run.qdisc = QdiscKind::kFq;
  return s;
}

std::vector<ScenarioConfig> build() {
  std::vector<ScenarioConfig> out;

  struct PacerChoice {
    PacerStrategy strategy;
    const char* label;
    const char* stack;
  };
  const PacerChoice pacers[] = {
      {PacerStrategy::kTimestamp, "timestamp", "per-packet timestamps, no timestamp-aware qdisc"},
      {PacerStrategy::kInterval, "interval", "user-space interval pacer"},
      {PacerStrategy::kLeakyBucket, "leaky", "leaky bucket of 16 packets"},
  };
  for (CcaKind cca : {CcaKind::kCubic, CcaKind::kReno, CcaKind::kBbr}) {
    for (const auto& pacer : pacers) {
      ScenarioConfig s = make(
          "baseline-" + lower(toString(cca)) + "-" + pacer.label,
          std::string(toString(cca)) + ", " + pacer.stack + ", default OS queueing");
      s.run.cca.kind = cca;
      s.run.pacer.strategy = pacer.strategy;
      s.run.qdisc = QdiscKind::kFifo;
      // The timestamp-pacing stack ships with spurious-loss rollback enabled.
      s.run.cca.rollbackEnabled =
          cca == CcaKind::kCubic && pacer.strategy == PacerStrategy::kTimestamp;
      out.push_back(s);
    }
  }
  {
    ScenarioConfig s = *std::find_if(out.begin(), out.end(), [](const ScenarioConfig& c) {
      return c.name == "baseline-cubic-timestamp";
    });
    s.name = "baseline-cubic-quicheish";
    s.description = "Same as baseline-cubic-timestamp";
    out.push_back(s);
  }
  {
    ScenarioConfig s = make(
        "leaky-idle-cycles",
        "CUBIC, leaky bucket of 16 packets, application idle 5 ms of every 10 ms");
    s.run.pacer.strategy = PacerStrategy::kLeakyBucket;
    s.run.app.kind = AppPatternKind::kIdleCycles;
    s.run.app.on = 5ms;
    s.run.app.off = 5ms;
    out.push_back(s);
  }
  for (bool rollback : {true, false}) {
    ScenarioConfig s = fqSender(
        rollback ? "fq-rollback-on" : "fq-rollback-off",
        std::string("CUBIC with timestamps enforced by FQ, spurious-loss rollback ") +
            (rollback ? "enabled" : "disabled"));
    s.run.cca.rollbackEnabled = rollback;
    out.push_back(s);
  }
  {
    ScenarioConfig s = fqSender("gso-off", "CUBIC over FQ without segmentation offload");
    out.push_back(s);
    s = fqSender("gso-burst", "CUBIC over FQ, GSO buffers of up to 16 segments sent as bursts");
    s.run.gso.enabled = true;
    s.run.gso.mode = GsoMode::kBurst;
    out.push_back(s);
    s = fqSender(
        "gso-paced", "CUBIC over FQ, GSO buffers of up to 16 segments paced by the kernel");
    s.run.gso.enabled = true;
    s.run.gso.mode = GsoMode::kPaced;
    out.push_back(s);
  }
  for (bool offload : {false, true}) {
    ScenarioConfig s = fqSender(
        offload ? "etf-offload" : "etf-sw",
        std::string("CUBIC over ETF (200 us delta) with paced GSO, launch time ") +
            (offload ? "offloaded to the NIC" : "kept in software"));
    s.run.qdisc = QdiscKind::kEtf;
    s.run.etf.offload = offload;
    s.run.gso.enabled = true;
    s.run.gso.mode = GsoMode::kPaced;
    out.push_back(s);
  }
  {
    ScenarioConfig s = make(
        "precision-none",
        "CUBIC, user-space interval pacer with 0.5 ms timer jitter, no qdisc");
    s.run.pacer.strategy = PacerStrategy::kInterval;
    s.run.pacer.releaseJitter = JitterModel::normal(500us);
    s.run.qdisc = QdiscKind::kNone;
    out.push_back(s);
    s = fqSender("precision-fq", "CUBIC with timestamps enforced by FQ");
    out.push_back(s);
    s = fqSender("precision-etf", "CUBIC with timestamps enforced by ETF in software");
    s.run.qdisc = QdiscKind::kEtf;
    out.push_back(s);
  }
  for (auto& s : out) {
    s = normalized(s);
  }
  return out;
}

} // namespace

const std::vector<ScenarioConfig>& presets() {
  static const std::vector<ScenarioConfig> all = build();
  return all;
}

std::optional<ScenarioConfig> findPreset(std::string_view name) {
  for (const auto& s : presets()) {
    if (s.name == name) {
      return s;
    }
  }
  return std::nullopt;
}

} // namespace pacesim

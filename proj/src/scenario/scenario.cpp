#include "pacesim/scenario/scenario.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pacesim/sim/rng.h"

namespace pacesim {
namespace {

using nlohmann::json;
using Problems = std::vector<std::string>;

std::string joinProblems(const std::vector<std::string>& problems) {
  std::string message = "invalid scenario:";
  for (const auto& p : problems) {
    message += "\n  - " + p;
  }
  return message;
}

double toUnit(SimTime t, double nsPerUnit) {
  return static_cast<double>(t.count()) / nsPerUnit;
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json* node, std::string path, Problems& problems)
      : node_(node), path_(std::move(path)), problems_(problems) {
    if (node_ && !node_->is_object()) {
      problems_.push_back(where() + " must be an object");
      node_ = nullptr;
    }
  }

  Section child(const char* key) {
    return Section(find(key), join(key), problems_);
  }

  void read(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        problems_.push_back(join(key) + " must be a boolean");
      }
    }
  }

  void read(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        problems_.push_back(join(key) + " must be a string");
      }
    }
  }

  void read(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        problems_.push_back(join(key) + " must be a non-negative integer");
      }
    }
  }

  void read(const char* key, std::uint32_t& out) {
    std::uint64_t wide = out;
    read(key, wide);
    if (wide > std::numeric_limits<std::uint32_t>::max()) {
      problems_.push_back(join(key) + " is too large");
      return;
    }
    out = static_cast<std::uint32_t>(wide);
  }

  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number() && std::isfinite(v->get<double>())) {
        out = v->get<double>();
      } else {
        problems_.push_back(join(key) + " must be a finite number");
      }
    }
  }

  // A duration given as a number of `unit`s (1000 for microseconds, ...).
  void duration(const char* key, SimTime& out, double nsPerUnit) {
    double value = toUnit(out, nsPerUnit);
    const std::size_t before = problems_.size();
    read(key, value);
    if (problems_.size() != before) {
      return;
    }
    if (value < 0.0) {
      problems_.push_back(join(key) + " must not be negative");
      return;
    }
    if (value * nsPerUnit > 9.2e18) {
      problems_.push_back(join(key) + " is too large");
      return;
    }
    out = SimTime{std::llround(value * nsPerUnit)};
  }

  template <typename Enum>
  void readEnum(
      const char* key,
      Enum& out,
      const std::function<std::optional<Enum>(std::string_view)>& parse,
      std::string_view allowed) {
    std::string name;
    const std::size_t before = problems_.size();
    read(key, name);
    if (problems_.size() != before || !find(key)) {
      return;
    }
    if (auto value = parse(name)) {
      out = *value;
    } else {
      problems_.push_back(
          join(key) + " has unknown value \"" + name + "\" (expected one of " +
          std::string(allowed) + ")");
    }
  }

  void jitter(const char* key, JitterModel& out) {
    Section s = child(key);
    if (!s.present()) {
      return;
    }
    const bool hasMean = s.has("mean_us");
    s.duration("stddev_us", out.stddev, 1e3);
    if (hasMean) {
      s.duration("mean_us", out.mean, 1e3);
    } else {
      out.mean = 3 * out.stddev;
    }
    s.finish();
  }

  bool present() const noexcept {
    return node_ != nullptr;
  }
  bool has(const char* key) const {
    return node_ && node_->contains(key);
  }

  void finish() {
    if (!node_) {
      return;
    }
    for (const auto& [key, value] : node_->items()) {
      if (!seen_.count(key)) {
        problems_.push_back(join(key.c_str()) + " is not a known field");
      }
    }
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    if (!node_) {
      return nullptr;
    }
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }
  std::string where() const {
    return path_.empty() ? "scenario" : path_;
  }
  std::string join(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const json* node_;
  std::string path_;
  Problems& problems_;
  std::set<std::string> seen_;
};

json jitterJson(const JitterModel& jitter) {
  return json{{"stddev_us", toUnit(jitter.stddev, 1e3)}, {"mean_us", toUnit(jitter.mean, 1e3)}};
}

json toJson(const ScenarioConfig& s, bool withIdentity) {
  const RunConfig& r = s.run;
  json j;
  if (withIdentity) {
    j["name"] = s.name;
    j["description"] = s.description;
  }
  j["transfer"] = {{"object_size", r.transfer.objectSize}, {"mss", r.transfer.mss}};
  j["cca"] = {
      {"name", toString(r.cca.kind)},
      {"rollback_enabled", r.cca.rollbackEnabled},
      {"hystart_enabled", r.cca.hystartEnabled},
      {"spurious_threshold", r.cca.spuriousThreshold},
      {"pacing_gain", r.cca.pacingGain},
      {"initial_window_packets", r.cca.initialWindowPackets},
  };
  j["pacer"] = {
      {"strategy", toString(r.pacer.strategy)},
      {"bucket_capacity", r.pacer.bucketCapacityPackets},
      {"jitter", jitterJson(r.pacer.releaseJitter)},
  };
  j["gso"] = {
      {"enabled", r.gso.enabled},
      {"mode", toString(r.gso.mode)},
      {"max_segments", r.gso.maxSegments},
      {"batch_divisor", r.gso.batchCwndDivisor},
  };
  j["qdisc"] = {
      {"kind", toString(r.qdisc)},
      {"delta_us", toUnit(r.etf.delta, 1e3)},
      {"offload", r.etf.offload},
  };
  j["nic"] = {
      {"line_rate_bps", r.nic.lineRateBps},
      {"sw_dequeue_jitter", jitterJson(r.nic.swDequeueJitter)},
      {"etf_jitter", jitterJson(r.nic.etfSoftwareJitter)},
      {"launch_time_jitter", jitterJson(r.nic.launchTimePrecisionJitter)},
  };
  j["path"] = {
      {"rate_bps", r.path.rateBps},
      {"one_way_delay_ms", toUnit(r.path.oneWayDelayForward, 1e6)},
      {"buffer_bytes", r.path.bufferBytes},
  };
  j["app_pattern"] = {
      {"kind", toString(r.app.kind)},
      {"on_ms", toUnit(r.app.on, 1e6)},
      {"off_ms", toUnit(r.app.off, 1e6)},
  };
  j["analysis"] = {
      {"train_threshold_us", toUnit(s.trains.threshold, 1e3)},
      {"inclusive", s.trains.inclusive},
  };
  j["repetitions"] = s.repetitions;
  j["seed"] = s.seed;
  j["time_limit_s"] = toUnit(r.timeLimit, 1e9);
  return j;
}

ScenarioConfig fromJson(const json& root, Problems& problems) {
  ScenarioConfig s;
  RunConfig& r = s.run;
  Section top(&root, "", problems);
  top.read("name", s.name);
  top.read("description", s.description);

  Section transfer = top.child("transfer");
  transfer.read("object_size", r.transfer.objectSize);
  transfer.read("mss", r.transfer.mss);
  transfer.finish();

  Section cca = top.child("cca");
  cca.readEnum<CcaKind>("name", r.cca.kind, ccaKindFromString, "CUBIC, RENO, BBR");
  cca.read("rollback_enabled", r.cca.rollbackEnabled);
  cca.read("hystart_enabled", r.cca.hystartEnabled);
  cca.read("spurious_threshold", r.cca.spuriousThreshold);
  cca.read("pacing_gain", r.cca.pacingGain);
  cca.read("initial_window_packets", r.cca.initialWindowPackets);
  cca.finish();

  Section pacer = top.child("pacer");
  pacer.readEnum<PacerStrategy>(
      "strategy",
      r.pacer.strategy,
      pacerStrategyFromString,
      "TIMESTAMP, INTERVAL, LEAKY_BUCKET, NONE");
  pacer.read("bucket_capacity", r.pacer.bucketCapacityPackets);
  pacer.jitter("jitter", r.pacer.releaseJitter);
  pacer.finish();

  Section gso = top.child("gso");
  gso.read("enabled", r.gso.enabled);
  gso.readEnum<GsoMode>("mode", r.gso.mode, gsoModeFromString, "BURST, PACED");
  gso.read("max_segments", r.gso.maxSegments);
  gso.read("batch_divisor", r.gso.batchCwndDivisor);
  gso.finish();

  Section qdisc = top.child("qdisc");
  qdisc.readEnum<QdiscKind>("kind", r.qdisc, qdiscKindFromString, "NONE, FIFO, FQ, ETF");
  qdisc.duration("delta_us", r.etf.delta, 1e3);
  qdisc.read("offload", r.etf.offload);
  qdisc.finish();

  Section nic = top.child("nic");
  nic.read("line_rate_bps", r.nic.lineRateBps);
  nic.jitter("sw_dequeue_jitter", r.nic.swDequeueJitter);
  nic.jitter("etf_jitter", r.nic.etfSoftwareJitter);
  nic.jitter("launch_time_jitter", r.nic.launchTimePrecisionJitter);
  nic.finish();

  Section path = top.child("path");
  path.read("rate_bps", r.path.rateBps);
  path.duration("one_way_delay_ms", r.path.oneWayDelayForward, 1e6);
  r.path.oneWayDelayReverse = r.path.oneWayDelayForward;
  path.read("buffer_bytes", r.path.bufferBytes);
  path.finish();

  Section app = top.child("app_pattern");
  app.readEnum<AppPatternKind>(
      "kind", r.app.kind, appPatternKindFromString, "CONTINUOUS, IDLE_CYCLES");
  app.duration("on_ms", r.app.on, 1e6);
  app.duration("off_ms", r.app.off, 1e6);
  app.finish();

  Section analysis = top.child("analysis");
  analysis.duration("train_threshold_us", s.trains.threshold, 1e3);
  analysis.read("inclusive", s.trains.inclusive);
  analysis.finish();

  top.read("repetitions", s.repetitions);
  top.read("seed", s.seed);
  top.duration("time_limit_s", r.timeLimit, 1e9);
  top.finish();
  return s;
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(joinProblems(problems)), problems_(std::move(problems)) {}

std::vector<std::string> validationProblems(const ScenarioConfig& scenario) {
  const RunConfig& r = scenario.run;
  Problems problems;
  auto require = [&problems](bool ok, const char* message) {
    if (!ok) {
      problems.emplace_back(message);
    }
  };
  require(r.transfer.objectSize > 0, "transfer.object_size must be positive");
  require(
      r.transfer.mss > r.transfer.headerBytes && r.transfer.mss <= 65535,
      "transfer.mss must exceed the 48 B header and fit in a datagram (<= 65535)");
  require(r.cca.spuriousThreshold >= 1, "cca.spurious_threshold must be at least 1");
  require(r.cca.pacingGain > 0.0, "cca.pacing_gain must be positive");
  require(r.cca.initialWindowPackets >= 2, "cca.initial_window_packets must be at least 2");
  require(
      !r.cca.rollbackEnabled || r.cca.kind == CcaKind::kCubic,
      "cca.rollback_enabled requires cca.name=CUBIC");
  require(r.pacer.bucketCapacityPackets >= 1, "pacer.bucket_capacity must be at least 1");
  require(
      r.qdisc != QdiscKind::kEtf || r.pacer.strategy == PacerStrategy::kTimestamp,
      "qdisc.kind=ETF requires pacer.strategy=TIMESTAMP (ETF needs per-packet txtimes)");
  require(
      r.gso.mode != GsoMode::kPaced || r.gso.enabled,
      "gso.mode=PACED requires gso.enabled=true");
  require(
      r.gso.maxSegments >= 1 && r.gso.maxSegments <= 64,
      "gso.max_segments must be between 1 and 64");
  require(
      !r.etf.offload || r.qdisc == QdiscKind::kEtf, "qdisc.offload requires qdisc.kind=ETF");
  require(r.nic.lineRateBps > 0.0, "nic.line_rate_bps must be positive");
  require(r.path.rateBps > 0.0, "path.rate_bps must be positive");
  require(
      r.path.rateBps <= r.nic.lineRateBps, "path.rate_bps must not exceed nic.line_rate_bps");
  require(
      r.path.bufferBytes >= r.transfer.mss, "path.buffer_bytes must hold at least one packet");
  require(
      r.path.oneWayDelayForward > kZeroTime || r.path.oneWayDelayReverse > kZeroTime,
      "path.one_way_delay_ms must be positive");
  require(
      r.app.kind != AppPatternKind::kIdleCycles ||
          (r.app.on > kZeroTime && r.app.off > kZeroTime),
      "app_pattern IDLE_CYCLES needs positive on_ms and off_ms");
  require(scenario.trains.threshold > kZeroTime, "analysis.train_threshold_us must be positive");
  require(scenario.repetitions >= 1, "repetitions must be at least 1");
  require(
      scenario.seed <= std::numeric_limits<std::uint64_t>::max() - scenario.repetitions,
      "seed + repetitions overflows");
  require(r.timeLimit > kZeroTime, "time_limit_s must be positive");
  return problems;
}

void validate(const ScenarioConfig& scenario) {
  auto problems = validationProblems(scenario);
  if (!problems.empty()) {
    throw ValidationError(std::move(problems));
  }
}

ScenarioConfig parseScenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("not valid JSON: ") + e.what()});
  }
  Problems problems;
  ScenarioConfig scenario = fromJson(root, problems);
  if (problems.empty()) {
    problems = validationProblems(scenario);
  }
  if (!problems.empty()) {
    throw ValidationError(std::move(problems));
  }
  return scenario;
}

ScenarioConfig loadScenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read scenario file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parseScenario(text.str());
}

ScenarioConfig normalized(const ScenarioConfig& scenario) {
  ScenarioConfig s = scenario;
  RunConfig& r = s.run;
  const RunConfig defaults;
  if (r.cca.kind != CcaKind::kCubic) {
    r.cca.rollbackEnabled = defaults.cca.rollbackEnabled;
    r.cca.spuriousThreshold = defaults.cca.spuriousThreshold;
  }
  if (r.cca.kind == CcaKind::kBbr) {
    r.cca.hystartEnabled = defaults.cca.hystartEnabled;
    r.cca.pacingGain = defaults.cca.pacingGain;
  }
  if (r.pacer.strategy != PacerStrategy::kLeakyBucket) {
    r.pacer.bucketCapacityPackets = defaults.pacer.bucketCapacityPackets;
  }
  if (!r.pacer.holdsPackets()) {
    r.pacer.releaseJitter = defaults.pacer.releaseJitter;
  }
  r.gso.segmentSize = r.transfer.mss;
  if (!r.gso.enabled) {
    r.gso.mode = defaults.gso.mode;
    r.gso.maxSegments = defaults.gso.maxSegments;
    r.gso.batchCwndDivisor = defaults.gso.batchCwndDivisor;
  }
  if (r.qdisc != QdiscKind::kEtf) {
    r.etf = defaults.etf;
  }
  r.nic.launchTimeEnabled = r.qdisc == QdiscKind::kEtf && r.etf.offload;
  if (r.qdisc != QdiscKind::kFq) {
    r.nic.swDequeueJitter = defaults.nic.swDequeueJitter;
  }
  if (r.qdisc != QdiscKind::kEtf || r.etf.offload) {
    r.nic.etfSoftwareJitter = defaults.nic.etfSoftwareJitter;
  }
  if (!r.nic.launchTimeEnabled) {
    r.nic.launchTimePrecisionJitter = defaults.nic.launchTimePrecisionJitter;
  }
  if (r.app.kind != AppPatternKind::kIdleCycles) {
    r.app.on = defaults.app.on;
    r.app.off = defaults.app.off;
  }
  return s;
}

std::string canonicalJson(const ScenarioConfig& scenario, int indent) {
  return toJson(normalized(scenario), true).dump(indent);
}

std::string scenarioHash(const ScenarioConfig& scenario) {
  const std::uint64_t hash = fnv1a(toJson(normalized(scenario), false).dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

} // namespace pacesim

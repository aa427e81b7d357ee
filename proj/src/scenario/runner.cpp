#include "pacesim/scenario/runner.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "pacesim/analysis/csv.h"

namespace pacesim {
namespace {

constexpr const char* kRunFiles[] = {"ipg.csv", "trains.csv", "cwnd.csv", "metrics.csv"};

std::string runDirName(std::uint32_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run-%03u", index);
  return buf;
}

void writeRunArtifacts(
    const std::filesystem::path& dir,
    const RunResult& result,
    const RunMetrics& metrics,
    const TrainOptions& trains) {
  std::filesystem::create_directories(dir);
  const auto gaps = interPacketGaps(result.packetLog);
  writeFileAtomically(dir / "ipg.csv", ipgCsv(gaps));
  writeFileAtomically(dir / "trains.csv", trainsCsv(extractTrains(result.packetLog, trains)));
  writeFileAtomically(dir / "cwnd.csv", cwndCsv(result.cwndTrace));
  writeFileAtomically(dir / "metrics.csv", metricsCsv(std::span(&metrics, 1)));
}

std::vector<NamedSummary> summarizeRuns(const std::vector<RunMetrics>& runs) {
  std::vector<double> goodput;
  std::vector<double> drops;
  std::vector<double> precision;
  for (const auto& run : runs) {
    if (run.goodputBps) {
      goodput.push_back(*run.goodputBps);
    }
    drops.push_back(static_cast<double>(run.droppedPackets));
    if (run.precisionNs) {
      precision.push_back(*run.precisionNs);
    }
  }
  return {
      {"goodput_bps", summarize(goodput)},
      {"drops", summarize(drops)},
      {"precision_ns", summarize(precision)},
  };
}

} // namespace

std::string_view toolVersion() {
  return "pacesim " PACESIM_VERSION;
}

RunMetrics runMetrics(const RunResult& result, std::uint64_t runId) {
  RunMetrics metrics;
  metrics.runId = runId;
  // Rounded to what metrics.csv records, so summaries agree with the files.
  auto whole = [](const std::optional<double>& v) -> std::optional<double> {
    if (!v) {
      return std::nullopt;
    }
    return static_cast<double>(std::llround(*v));
  };
  metrics.goodputBps = whole(result.goodputBps);
  metrics.droppedPackets = result.bottleneckDrops + result.qdiscDrops;
  metrics.precisionNs = whole(result.precisionNs);
  return metrics;
}

void writeFileAtomically(const std::filesystem::path& path, std::string_view contents) {
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + temp.string() + " for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      throw std::runtime_error("failed writing " + temp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw std::runtime_error("cannot move " + temp.string() + " to " + path.string());
  }
}

std::string manifestJson(const RunManifest& manifest) {
  nlohmann::json j;
  j["scenario_hash"] = manifest.scenarioHash;
  j["seeds"] = manifest.seeds;
  j["artifacts"] = manifest.artifacts;
  j["tool_version"] = manifest.toolVersion;
  return j.dump(2) + "\n";
}

RunManifest runScenario(const ScenarioConfig& scenario, const RunnerOptions& options) {
  validate(scenario);
  const ScenarioConfig config = normalized(scenario);
  std::filesystem::create_directories(options.outDir);

  RunManifest manifest;
  manifest.scenarioHash = scenarioHash(config);
  manifest.toolVersion = std::string(toolVersion());
  for (std::uint32_t i = 0; i < config.repetitions; ++i) {
    manifest.seeds.push_back(config.seed + i);
  }

  std::vector<RunMetrics> metrics(config.repetitions);
  std::atomic<std::uint32_t> next{0};
  std::mutex errorMutex;
  std::exception_ptr error;
  auto worker = [&]() {
    for (;;) {
      const std::uint32_t index = next.fetch_add(1);
      if (index >= config.repetitions) {
        return;
      }
      {
        std::lock_guard lock(errorMutex);
        if (error) {
          return;
        }
      }
      try {
        const RunResult result = runSimulation(config.run, manifest.seeds[index]);
        metrics[index] = runMetrics(result, index);
        writeRunArtifacts(
            options.outDir / runDirName(index), result, metrics[index], config.trains);
        if (options.onRunComplete) {
          options.onRunComplete(index, result);
        }
      } catch (...) {
        std::lock_guard lock(errorMutex);
        if (!error) {
          error = std::current_exception();
        }
      }
    }
  };
  unsigned jobs = options.jobs ? options.jobs : std::max(1U, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, config.repetitions);
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < jobs; ++t) {
    threads.emplace_back(worker);
  }
  worker();
  for (auto& t : threads) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }

  for (std::uint32_t i = 0; i < config.repetitions; ++i) {
    for (const char* file : kRunFiles) {
      manifest.artifacts.push_back(runDirName(i) + "/" + file);
    }
  }
  writeFileAtomically(options.outDir / "metrics.csv", metricsCsv(metrics));
  const auto summary = summarizeRuns(metrics);
  writeFileAtomically(options.outDir / "summary.csv", summaryCsv(summary));
  writeFileAtomically(options.outDir / "scenario.json", canonicalJson(config) + "\n");
  for (const char* file : {"metrics.csv", "summary.csv", "scenario.json"}) {
    manifest.artifacts.emplace_back(file);
  }
  writeFileAtomically(options.outDir / "manifest.json", manifestJson(manifest));
  return manifest;
}

} // namespace pacesim

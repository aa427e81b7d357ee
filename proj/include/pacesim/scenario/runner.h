#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pacesim/analysis/metrics.h"
#include "pacesim/scenario/scenario.h"
#include "pacesim/testbed/testbed.h"

namespace pacesim {

std::string_view toolVersion();

struct RunManifest {
  std::string scenarioHash;
  std::vector<std::uint64_t> seeds;
  // Paths relative to the output directory.
  std::vector<std::string> artifacts;
  std::string toolVersion;
};

struct RunnerOptions {
  std::filesystem::path outDir;
  // Worker threads; 0 uses the hardware concurrency.
  unsigned jobs{0};
  // Called from worker threads after each repetition finishes.
  std::function<void(std::uint32_t index, const RunResult& result)> onRunComplete;
};

// Per-run wire metrics. Drops count every lost data packet, at the bottleneck
// or in the host qdisc. Goodput and precision are rounded to whole units.
RunMetrics runMetrics(const RunResult& result, std::uint64_t runId);

// Validates the scenario, executes its repetitions and writes:
//   run-NNN/{ipg,trains,cwnd,metrics}.csv  per repetition
//   metrics.csv, summary.csv               across repetitions
//   scenario.json, manifest.json
// Every file is written atomically. Throws ValidationError before running
// anything if the scenario is invalid, std::runtime_error on I/O failure.
RunManifest runScenario(const ScenarioConfig& scenario, const RunnerOptions& options);

// Writes to a temporary sibling, then renames over `path`.
void writeFileAtomically(const std::filesystem::path& path, std::string_view contents);

std::string manifestJson(const RunManifest& manifest);

} // namespace pacesim

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pacesim/analysis/metrics.h"
#include "pacesim/testbed/run_config.h"

namespace pacesim {

// Everything wrong with a scenario, reported together.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept {
    return problems_;
  }

 private:
  std::vector<std::string> problems_;
};

// A declarative experiment: one configuration repeated with seeds
// seed, seed + 1, ..., seed + repetitions - 1.
struct ScenarioConfig {
  std::string name;
  std::string description;
  RunConfig run;
  std::uint32_t repetitions{20};
  std::uint64_t seed{1};
  TrainOptions trains;

  bool operator==(const ScenarioConfig&) const = default;
};

// Parses a JSON scenario. Missing fields keep their defaults; unknown keys,
// wrong types, bad enum names and violated constraints all raise one
// ValidationError listing every problem found.
ScenarioConfig parseScenario(std::string_view text);

// Reads and parses a scenario file. Throws std::runtime_error if the file
// cannot be read.
ScenarioConfig loadScenario(const std::filesystem::path& path);

// Constraint violations of an already-built scenario; empty when valid.
std::vector<std::string> validationProblems(const ScenarioConfig& scenario);

// Throws ValidationError if validationProblems() is non-empty.
void validate(const ScenarioConfig& scenario);

// Copy with every field that cannot influence a run reset to its default
// (e.g. ETF settings under FQ) and derived fields filled in.
ScenarioConfig normalized(const ScenarioConfig& scenario);

// Full JSON rendering of the normalized scenario with sorted keys. Parsing it
// back yields an equal normalized scenario.
std::string canonicalJson(const ScenarioConfig& scenario, int indent = 2);

// FNV-1a over the canonical JSON without name and description, as 16 hex
// digits. Changes exactly when a field that influences the runs changes.
std::string scenarioHash(const ScenarioConfig& scenario);

} // namespace pacesim

// Command-line front end: run scenarios, list presets, validate files.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pacesim/scenario/presets.h"
#include "pacesim/scenario/runner.h"

namespace {

using namespace pacesim;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr const char* kOutDirEnv = "PACESIM_OUT_DIR";

void printProblems(const ValidationError& e) {
  std::cerr << "validation failed:\n";
  for (const auto& p : e.problems()) {
    std::cerr << "  - " << p << '\n';
  }
}

std::filesystem::path defaultOutDir(const ScenarioConfig& scenario) {
  const char* env = std::getenv(kOutDirEnv);
  const std::filesystem::path root = env && *env ? env : "pacesim-out";
  return root / (scenario.name.empty() ? scenarioHash(scenario) : scenario.name);
}

struct RunArgs {
  std::string scenarioPath;
  std::string preset;
  std::string outDir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> reps;
  unsigned jobs{0};
};

int runCommand(const RunArgs& args) {
  ScenarioConfig scenario;
  if (!args.preset.empty() == !args.scenarioPath.empty()) {
    std::cerr << "run needs exactly one of <scenario> or --preset\n";
    return kExitValidation;
  }
  if (!args.preset.empty()) {
    auto preset = findPreset(args.preset);
    if (!preset) {
      std::cerr << "unknown preset \"" << args.preset << "\" (see list-presets)\n";
      return kExitValidation;
    }
    scenario = *preset;
  } else {
    scenario = loadScenario(args.scenarioPath);
  }
  if (args.seed) {
    scenario.seed = *args.seed;
  }
  if (args.reps) {
    scenario.repetitions = *args.reps;
  }
  validate(scenario);

  RunnerOptions options;
  options.outDir =
      args.outDir.empty() ? defaultOutDir(scenario) : std::filesystem::path(args.outDir);
  options.jobs = args.jobs;
  std::mutex progress;
  std::uint32_t done = 0;
  options.onRunComplete = [&](std::uint32_t index, const RunResult& result) {
    std::lock_guard lock(progress);
    ++done;
    std::fprintf(
        stderr,
        "[%u/%u] run %u seed %llu: %s, %llu drops\n",
        done,
        scenario.repetitions,
        index,
        static_cast<unsigned long long>(result.seed),
        result.complete ? "complete" : "INCOMPLETE",
        static_cast<unsigned long long>(result.bottleneckDrops + result.qdiscDrops));
  };
  const RunManifest manifest = runScenario(scenario, options);
  std::cout << "scenario " << (scenario.name.empty() ? "(unnamed)" : scenario.name) << " hash "
            << manifest.scenarioHash << '\n'
            << "wrote " << manifest.artifacts.size() << " artifacts to "
            << options.outDir.string() << '\n';
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for pacing of QUIC-like senders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(toolVersion()));

  RunArgs runArgs;
  auto* run = app.add_subcommand("run", "Execute a scenario's repetitions and write CSVs");
  run->add_option("scenario", runArgs.scenarioPath, "Scenario JSON file");
  run->add_option("--preset", runArgs.preset, "Run a shipped preset instead of a file");
  run->add_option(
      "--out", runArgs.outDir, std::string("Output directory (default $") + kOutDirEnv +
          "/<name>, else pacesim-out/<name>)");
  run->add_option("--seed", runArgs.seed, "Override the base seed");
  run->add_option("--reps", runArgs.reps, "Override the repetition count")
      ->check(CLI::PositiveNumber);
  run->add_option("--jobs", runArgs.jobs, "Parallel repetitions (default: all cores)");

  auto* list = app.add_subcommand("list-presets", "Print shipped presets");

  std::string validatePath;
  auto* check = app.add_subcommand("validate", "Check a scenario file without running it");
  check->add_option("scenario", validatePath, "Scenario JSON file")->required();

  std::string showName;
  auto* show = app.add_subcommand("show-preset", "Print a preset as a scenario file");
  show->add_option("name", showName, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*run) {
      return runCommand(runArgs);
    }
    if (*list) {
      for (const auto& preset : presets()) {
        std::printf("%-28s %s\n", preset.name.c_str(), preset.description.c_str());
      }
      return kExitOk;
    }
    if (*check) {
      const ScenarioConfig scenario = loadScenario(validatePath);
      std::cout << "valid, hash " << scenarioHash(scenario) << '\n';
      return kExitOk;
    }
    if (*show) {
      auto preset = findPreset(showName);
      if (!preset) {
        std::cerr << "unknown preset \"" << showName << "\"\n";
        return kExitValidation;
      }
      std::cout << canonicalJson(*preset) << '\n';
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    printProblems(e);
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacesim/scenario/scenario.h"

namespace pacesim {

// Shipped scenarios, each mirroring one measured configuration on the
// reference path (40 Mbit/s, 40 ms RTT, two-BDP buffer, 100 MiB, 20 runs).
const std::vector<ScenarioConfig>& presets();

std::optional<ScenarioConfig> findPreset(std::string_view name);

} // namespace pacesim

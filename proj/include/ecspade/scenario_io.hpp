#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ecspade/sim.hpp"

namespace ecspade {

/// A scenario plus the beta values to sweep over.
struct RunSpec {
  Scenario scenario;
  std::vector<double> betas;
};

/// Parses the flat `key = value` scenario format (see README). `#` starts a
/// comment; `beta` and `detectors` take comma-separated lists. Unknown or
/// repeated keys are errors. Throws InvalidScenario.
RunSpec parse_scenario(std::string_view text);
RunSpec load_scenario(const std::filesystem::path& path);

/// "fig1" (alpha 0.2, T 15) or "fig2" (alpha 0.6, T 5), beta 0.3 ... 1.0.
RunSpec preset(std::string_view name);

std::vector<double> parse_double_list(std::string_view text);
std::vector<DetectorId> parse_detector_list(std::string_view text);

}  // namespace ecspade

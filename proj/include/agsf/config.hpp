#pragma once

#include <filesystem>

#include "agsf/harness.hpp"

namespace agsf {

// Strict JSON config loading: unknown keys are errors, so sweep typos
// cannot silently run the wrong experiment. The schema is documented in
// docs/config.md.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

}  // namespace agsf

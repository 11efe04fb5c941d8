#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "galton/dos.hpp"
#include "galton/fit.hpp"
#include "galton/spin_model.hpp"
#include "galton/sweep.hpp"

namespace galton {

// Load and parse a JSON file; IoError when unreadable, InvalidConfig when
// not valid JSON.
nlohmann::json load_json_file(const std::string& path);

// Builders from the JSON config schema (see README).  Unknown keys are
// rejected so typos fail loudly; every builder ends with the target's own
// validate().
SpinSystemConfig spin_config_from_json(const nlohmann::json& j);
DosModel dos_from_json(const nlohmann::json& j);
BoardSamplingOptions sampling_from_json(const nlohmann::json& j);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
BuildupModel buildup_from_json(const nlohmann::json& j);

// JSON renderings for --format json output.
nlohmann::json to_json(const PopulationVector& pops);
nlohmann::json to_json(const SpectralMapResult& map);
nlohmann::json to_json(const FitResult& fit);

}  // namespace galton

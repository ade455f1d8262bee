#pragma once

#include <filesystem>

#include <json.hpp>

#include "robest/param_algebra.hpp"
#include "robest/run.hpp"

namespace robest {

/// `{"rows":2,"cols":2,"terms":[{"powers":{"theta1":1},"coeff":[[..],[..]]}]}`;
/// a bare nested array is accepted as a constant matrix.
ParamMatrix     param_matrix_from_json(const nlohmann::json& j, const ParamVectorSpec& spec);
nlohmann::json  param_matrix_to_json(const ParamMatrix& pm, const ParamVectorSpec& spec);
InputSignal     input_from_json(const nlohmann::json& j);
Scenario        scenario_from_json(const nlohmann::json& j);

/// Parses a run configuration. Scenario entries are either "preset:<name>",
/// "preset:all", {"random": {...}} or an inline scenario object.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace robest

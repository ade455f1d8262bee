#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "robest/run.hpp"

namespace robest {

/// Shortest-of-17-significant-digits text for CSV cells.
std::string format_double(double value);

/// Fixed column order of summary.csv.
const std::vector<std::string>& summary_columns();

void write_summary_csv(const std::vector<ScenarioAnalysis>& analyses, const std::filesystem::path& path);

nlohmann::ordered_json to_json(const BoundReport& report);
nlohmann::ordered_json to_json(const RobustnessResult& result);
nlohmann::ordered_json to_json(const ScenarioAnalysis& analysis);

void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

/// Grouped log-scale bar chart: ground truth against each bound, per parameter.
std::string render_svg(const ScenarioAnalysis& analysis);
void        write_svg(const ScenarioAnalysis& analysis, const std::filesystem::path& path);

}  // namespace robest

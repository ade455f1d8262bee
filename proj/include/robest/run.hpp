#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robest/bounds.hpp"
#include "robest/metric.hpp"
#include "robest/scenarios.hpp"
#include "robest/sensitivity.hpp"

namespace robest {

enum class AnalysisMode {
    strict,          ///< refuse the log-norm bounds when μ(Ā) ≥ 0
    preconditioned,  ///< evaluate them in Lyapunov coordinates instead
};

std::string  to_string(AnalysisMode mode);
AnalysisMode analysis_mode_from_string(const std::string& name);

struct AnalysisOptions {
    AnalysisMode               mode = AnalysisMode::preconditioned;
    std::optional<double>      dt;
    std::optional<std::vector<MetricSource>> bounds;  ///< overrides Scenario::bounds
    bool                       theorem2_strict  = true;
    double                     oracle_tolerance = 1e-3;
    MetricOptions              metric;
};

struct ScenarioAnalysis {
    std::string                 name;
    AnalysisMode                mode = AnalysisMode::preconditioned;
    double                      horizon  = 0.0;
    double                      dt       = 0.0;
    double                      mu       = 0.0;  ///< log-norm of Ā(θ*) in original coordinates
    double                      err_norm = 0.0;  ///< ‖ȳ‖_{L²[0,N]} at θ*
    std::optional<Preconditioner> preconditioner;
    std::vector<MetricSource>   sources;
    std::vector<BoundReport>    reports;
    std::map<MetricSource, RobustnessResult> metrics;
    Trajectory                  nominal_output;
    std::vector<SensitivityTrajectory> sensitivities;
    std::vector<std::string>    warnings;
};

/// Simulates, computes both ground-truth routes and the requested bounds for
/// every parameter of interest, and aggregates R per source.
ScenarioAnalysis analyze_scenario(const Scenario& scenario, const AnalysisOptions& options = {});

struct RunConfig {
    std::vector<Scenario>  scenarios;
    AnalysisOptions        analysis;
    std::filesystem::path  out_dir = "robest_out";
    std::uint64_t          seed    = 0;
    bool                   write_trajectories = true;
    int                    threads            = 0;  ///< 0: hardware concurrency
};

struct RunSummary {
    std::vector<ScenarioAnalysis>      analyses;
    std::vector<std::filesystem::path> artifacts;
};

/// Analyzes every scenario and writes summary.csv, bounds_<name>.json,
/// trajectory CSVs and fig_<name>.svg into out_dir.
RunSummary run(const RunConfig& config);

}  // namespace robest

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "robest/bounds.hpp"

namespace robest {

enum class MetricSource { ground_truth, theorem1, theorem2, gramian_baseline };

std::string  to_string(MetricSource source);
MetricSource metric_source_from_string(const std::string& name);

/// One summand of the robustness distance.
struct DistanceTerm {
    double theta_star = 0.0;
    double sens_norm  = 0.0;  ///< L² norm of ∂ȳ/∂θᵢ (square root of the energy)
    double err_norm   = 0.0;  ///< L² norm of the nominal error ȳ
};

struct Contribution {
    std::size_t param_index = 0;
    double      theta_star  = 0.0;
    double      sens_norm   = 0.0;
    double      err_norm    = 0.0;
    double      value       = 0.0;  ///< |θᵢ*|·sens/err
};

struct RobustnessResult {
    double                    d_R = 0.0;
    double                    R   = 1.0;
    std::vector<Contribution> contributions;
    MetricSource              source = MetricSource::ground_truth;
    std::vector<std::string>  warnings;
};

struct MetricOptions {
    /// Treat a zero error norm as a perfect estimator (term contributes 0)
    /// instead of rejecting it.
    bool perfect_estimator_is_robust = false;
};

/// d_R = Σ |θᵢ*|·sensᵢ/errᵢ. Zero or negative θᵢ* is reported in `warnings`.
double robustness_distance(std::span<const DistanceTerm> terms, const MetricOptions& options = {},
                           std::vector<std::string>* warnings = nullptr);

/// R = 1/(1 + d_R).
double robustness_metric(double d_R);

/// d_R and R with √bound in place of the sensitivity norm for every report.
RobustnessResult metric_from_bounds(std::span<const BoundReport> reports, double err_norm, MetricSource source,
                                    const MetricOptions& options = {});

}  // namespace robest

#include "robest/metric.hpp"

#include <cmath>
#include <sstream>

#include "robest/error.hpp"

namespace robest {

std::string to_string(MetricSource source) {
    switch (source) {
        case MetricSource::ground_truth: return "ground_truth";
        case MetricSource::theorem1: return "theorem1";
        case MetricSource::theorem2: return "theorem2";
        case MetricSource::gramian_baseline: return "gramian_baseline";
    }
    return "unknown";
}

MetricSource metric_source_from_string(const std::string& name) {
    if (name == "ground_truth") return MetricSource::ground_truth;
    if (name == "theorem1") return MetricSource::theorem1;
    if (name == "theorem2") return MetricSource::theorem2;
    if (name == "gramian_baseline" || name == "baseline") return MetricSource::gramian_baseline;
    detail::reject("unknown bound source '" + name + "'");
}

namespace {

double contribution(const DistanceTerm& term, std::size_t i, const MetricOptions& options,
                    std::vector<std::string>* warnings) {
    if (!(term.sens_norm >= 0.0)) detail::reject("robustness_distance: sensitivity norm must be nonnegative");
    if (!(term.err_norm >= 0.0)) detail::reject("robustness_distance: error norm must be nonnegative");
    if (term.err_norm == 0.0) {
        if (options.perfect_estimator_is_robust) return 0.0;
        detail::reject("perfect estimator: metric undefined, R = 1 by convention available via flag");
    }
    if (warnings) {
        std::ostringstream os;
        if (term.theta_star == 0.0)
            os << "parameter " << i << " has nominal value 0; the metric is blind to it";
        else if (term.theta_star < 0.0)
            os << "parameter " << i << " has negative nominal value " << term.theta_star << "; using |theta*|";
        if (!os.str().empty()) warnings->push_back(os.str());
    }
    return std::abs(term.theta_star) * term.sens_norm / term.err_norm;
}

}  // namespace

double robustness_distance(std::span<const DistanceTerm> terms, const MetricOptions& options,
                           std::vector<std::string>* warnings) {
    double d = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) d += contribution(terms[i], i, options, warnings);
    return d;
}

double robustness_metric(double d_R) {
    if (!(d_R >= 0.0)) detail::reject("robustness_metric: distance must be nonnegative");
    return 1.0 / (1.0 + d_R);
}

RobustnessResult metric_from_bounds(std::span<const BoundReport> reports, double err_norm, MetricSource source,
                                    const MetricOptions& options) {
    RobustnessResult result;
    result.source = source;
    for (const auto& report : reports) {
        std::optional<double> energy;
        switch (source) {
            case MetricSource::ground_truth: energy = report.ground_truth_energy; break;
            case MetricSource::theorem1: energy = report.theorem1; break;
            case MetricSource::theorem2: energy = report.theorem2; break;
            case MetricSource::gramian_baseline: energy = report.gramian_baseline; break;
        }
        if (!energy) {
            std::ostringstream os;
            os << "metric_from_bounds: no " << to_string(source) << " value for parameter " << report.param_index;
            detail::reject(os.str());
        }
        const DistanceTerm term{report.theta_star, std::sqrt(std::max(0.0, *energy)), err_norm};
        const double       value = contribution(term, report.param_index, options, &result.warnings);
        result.contributions.push_back({report.param_index, term.theta_star, term.sens_norm, err_norm, value});
        result.d_R += value;
    }
    result.R = robustness_metric(result.d_R);
    return result;
}

}  // namespace robest

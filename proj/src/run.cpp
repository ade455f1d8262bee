#include "robest/run.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "robest/report.hpp"

namespace robest {

std::string to_string(AnalysisMode mode) { return mode == AnalysisMode::strict ? "strict" : "precond"; }

AnalysisMode analysis_mode_from_string(const std::string& name) {
    if (name == "strict") return AnalysisMode::strict;
    if (name == "precond" || name == "preconditioned") return AnalysisMode::preconditioned;
    detail::reject("unknown mode '" + name + "' (expected strict or precond)");
}

namespace {

bool contains(const std::vector<MetricSource>& v, MetricSource s) { return std::find(v.begin(), v.end(), s) != v.end(); }

// Settling horizon: e^{−|μ|N} = 1e-6.
double settling_horizon(double mu) { return std::log(1e6) / std::abs(mu); }

}  // namespace

ScenarioAnalysis analyze_scenario(const Scenario& scenario, const AnalysisOptions& options) {
    scenario.validate();
    ScenarioAnalysis out;
    out.name    = scenario.name;
    out.mode    = options.mode;
    out.sources = options.bounds.value_or(scenario.bounds);
    if (out.sources.empty()) detail::reject("scenario '" + scenario.name + "': no bound source requested");

    const AugmentedSystem aug   = build_augmented(scenario.truth, scenario.estimate);
    const Vector          theta = aug.spec.nominal_vector();
    const RealSystem      sys   = aug.eval(theta);
    const InputSignal&    u     = scenario.input;

    const double alpha = spectral_abscissa(sys.A);
    if (!(alpha < 0.0)) {
        std::ostringstream os;
        os << "scenario '" << scenario.name << "': augmented dynamics are not exponentially stable (spectral abscissa "
           << alpha << ")";
        detail::reject(os.str());
    }
    out.mu = log_norm(sys.A).mu;

    const bool wants_thm1 = contains(out.sources, MetricSource::theorem1);
    std::optional<AugmentedSystem> transformed;
    if (out.mu >= 0.0) {
        if (options.mode == AnalysisMode::preconditioned) {
            out.preconditioner = lyapunov_preconditioner(sys.A);
            if (wants_thm1) transformed = similarity_transform(aug, out.preconditioner->T);
        } else if (!scenario.horizon) {
            std::ostringstream os;
            os << "scenario '" << scenario.name << "': log-norm " << out.mu
               << " >= 0, so no default horizon exists in strict mode; give a horizon or use --mode precond";
            detail::reject(os.str());
        }
    }

    if (scenario.horizon) {
        out.horizon = *scenario.horizon;
    } else {
        out.horizon = settling_horizon(out.mu < 0.0 ? out.mu : out.preconditioner->mu_after);
    }
    const double   N    = out.horizon;
    const TimeGrid grid = TimeGrid::covering(N, options.dt.value_or(default_dt(sys.A, N)));
    out.dt              = grid.dt;

    const SimulationResult nominal = simulate(sys, u, grid);
    out.nominal_output             = nominal.outputs;
    out.err_norm                   = std::sqrt(l2_energy(nominal.outputs, N).value);

    const double bu   = bu_sup_norm(aug, u, theta, N);
    const double bu_t = transformed ? bu_sup_norm(*transformed, u, theta, N) : bu;

    for (std::size_t i : scenario.params_of_interest) {
        BoundReport r;
        r.param_index = i;
        r.param_name  = aug.spec.names[i];
        r.theta_star  = theta[static_cast<Eigen::Index>(i)];

        SensitivityTrajectory ode = sensitivity_ode(aug, i, theta, u, grid);
        r.ground_truth_energy     = l2_energy(ode, N).value;
        const double h            = scenario.fd_step.value_or(default_fd_step(r.theta_star));
        r.ground_truth_energy_fd  = l2_energy(sensitivity_fd(aug, i, theta, h, u, grid), N).value;
        out.sensitivities.push_back(std::move(ode));

        const RealSystem d = aug.partial(i, theta);
        r.constants.mu      = out.mu;
        r.constants.N       = N;
        r.constants.dA_norm = norm2(d.A);
        r.constants.bu_inf  = bu;
        r.constants.x0_norm = sys.x0.norm();
        const bool only_dynamics = d.B.isZero(0.0) && d.C.isZero(0.0) && d.D.isZero(0.0) && d.x0.isZero(0.0);

        std::vector<std::string> issues;
        std::vector<std::string> notes;
        if (std::abs(r.ground_truth_energy - *r.ground_truth_energy_fd) >
            options.oracle_tolerance * std::max(r.ground_truth_energy, 1e-12))
            issues.push_back("oracle_mismatch");

        if (contains(out.sources, MetricSource::theorem1)) {
            const TheoremOneTerms terms = theorem1_terms(transformed ? *transformed : aug, i, theta, bu_t, N);
            r.theorem1                  = terms.total();
            if (terms.constants.dA_norm > 0.0) r.constants = terms.constants;
            r.constants.N = N;
            if (transformed) {
                r.transformed_coordinates = true;
                r.transform_condition     = out.preconditioner->condition_number;
                notes.push_back("precond");
            }
            if (!only_dynamics) notes.push_back("thm1_out_of_hypothesis");
        }
        if (contains(out.sources, MetricSource::theorem2)) {
            r.theorem2 = theorem2_bound(aug, i, theta, options.theorem2_strict);
            if (!aug.dynamics_parameter_free()) notes.push_back("thm2_out_of_hypothesis");
        }
        if (contains(out.sources, MetricSource::gramian_baseline)) {
            r.gramian_baseline = gramian_baseline_bound(aug, i, theta, nominal.states, N);
            if (!only_dynamics) notes.push_back("baseline_out_of_hypothesis");
        }

        auto check_dominance = [&](const std::optional<double>& bound, const char* tag) {
            if (bound && *bound < r.ground_truth_energy) issues.push_back(std::string(tag) + "_below_gt");
        };
        check_dominance(r.theorem1, "thm1");
        check_dominance(r.theorem2, "thm2");
        check_dominance(r.gramian_baseline, "baseline");
        if (r.theta_star == 0.0) notes.push_back("theta_zero");
        if (r.theta_star < 0.0) notes.push_back("theta_negative");

        if (issues.empty()) r.flags.push_back("ok");
        r.flags.insert(r.flags.end(), issues.begin(), issues.end());
        r.flags.insert(r.flags.end(), notes.begin(), notes.end());
        out.reports.push_back(std::move(r));
    }

    std::vector<MetricSource> metric_sources{MetricSource::ground_truth};
    metric_sources.insert(metric_sources.end(), out.sources.begin(), out.sources.end());
    for (MetricSource source : metric_sources) {
        RobustnessResult result = metric_from_bounds(out.reports, out.err_norm, source, options.metric);
        out.warnings.insert(out.warnings.end(), result.warnings.begin(), result.warnings.end());
        out.metrics.emplace(source, std::move(result));
    }
    std::sort(out.warnings.begin(), out.warnings.end());
    out.warnings.erase(std::unique(out.warnings.begin(), out.warnings.end()), out.warnings.end());
    return out;
}

RunSummary run(const RunConfig& config) {
    if (config.scenarios.empty()) detail::reject("run: configuration has no scenarios");
    for (std::size_t a = 0; a < config.scenarios.size(); ++a)
        for (std::size_t b = a + 1; b < config.scenarios.size(); ++b)
            if (config.scenarios[a].name == config.scenarios[b].name)
                detail::reject("run: duplicate scenario name '" + config.scenarios[a].name + "'");

    RunSummary summary;
    summary.analyses.resize(config.scenarios.size());

    const std::size_t workers = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                                   : std::max(1U, std::thread::hardware_concurrency());
    // Batches of `workers` scenarios; results land in config order.
    for (std::size_t start = 0; start < config.scenarios.size(); start += workers) {
        const std::size_t stop = std::min(config.scenarios.size(), start + workers);
        std::vector<std::future<ScenarioAnalysis>> jobs;
        for (std::size_t s = start; s < stop; ++s)
            jobs.push_back(std::async(std::launch::async, analyze_scenario, std::cref(config.scenarios[s]),
                                      std::cref(config.analysis)));
        for (std::size_t s = start; s < stop; ++s) summary.analyses[s] = jobs[s - start].get();
    }

    std::filesystem::create_directories(config.out_dir);
    auto record = [&](const std::filesystem::path& p) { summary.artifacts.push_back(p); };

    const auto summary_path = config.out_dir / "summary.csv";
    write_summary_csv(summary.analyses, summary_path);
    record(summary_path);
    for (const auto& a : summary.analyses) {
        const auto json_path = config.out_dir / ("bounds_" + a.name + ".json");
        write_json(to_json(a), json_path);
        record(json_path);
        const auto svg_path = config.out_dir / ("fig_" + a.name + ".svg");
        write_svg(a, svg_path);
        record(svg_path);
        if (config.write_trajectories) {
            const auto traj_path = config.out_dir / ("traj_" + a.name + ".csv");
            write_trajectory_csv(a.nominal_output, traj_path, "v");
            record(traj_path);
            for (const auto& s : a.sensitivities) {
                const auto sens_path = config.out_dir / ("sens_" + a.name + "_" + a.reports.at(&s - &a.sensitivities[0]).param_name + ".csv");
                write_trajectory_csv(s.trajectory, sens_path, "ds_");
                record(sens_path);
            }
        }
    }
    return summary;
}

}  // namespace robest

#include "robest/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "robest/bounds.hpp"
#include "robest/linalg.hpp"
#include "robest/metric.hpp"
#include "robest/run.hpp"
#include "robest/scenarios.hpp"
#include "robest/sensitivity.hpp"

namespace robest {

namespace {

constexpr double kDelta = 0.5;  // log-norm margin of every random population

class Stopwatch {
   public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

// 1 -------------------------------------------------------------------------

CheckResult check_exponential_envelopes(const CheckOptions& options) {
    Stopwatch   clock;
    CheckResult res{1, "log-norm envelopes: ||e^{At}|| and ||d e^{At}/dtheta|| under e^{-|mu|t}", true, false, "", 0.0};
    std::size_t violations = 0;
    double      worst      = 0.0;  // max ratio observed/envelope
    for (std::size_t s = 0; s < options.population; ++s) {
        Rng        rng(1000 + s);
        const auto n  = static_cast<Eigen::Index>(2 + s % 5);
        Matrix     A  = rng.uniform_matrix(n, n, -1.0, 1.0);
        A            -= (log_norm(A).mu + kDelta) * Matrix::Identity(n, n);
        Matrix E      = rng.uniform_matrix(n, n, -1.0, 1.0);
        E /= norm2(E);
        const double mu = std::abs(log_norm(A).mu);
        for (int k = 1; k <= 100; ++k) {
            const double t        = 0.1 * k;
            const double decay    = std::exp(-mu * t);
            const double r_exp    = norm2(expm(A * t)) / decay;
            const double r_deriv  = norm2(expm_param_derivative(A, E, t)) / (t * decay);
            worst                 = std::max({worst, r_exp, r_deriv});
            if (r_exp > 1.0 + 1e-9) ++violations;
            if (r_deriv > 1.0 + 1e-9) ++violations;
        }
    }
    res.seconds = clock.seconds();
    res.passed  = violations == 0 && res.seconds < 10.0;
    res.detail  = std::to_string(options.population) + " matrices x 100 times, violations " +
                 std::to_string(violations) + ", max observed/envelope " + fmt(worst) + ", " + fmt(res.seconds) + " s";
    return res;
}

// 2 -------------------------------------------------------------------------

namespace {

// Ground-truth energy of ∂ȳ/∂θ₁ on the scenario's horizon via the sensitivity ODE.
double ground_truth_energy(const AugmentedSystem& aug, const Scenario& sc) {
    const Vector   theta = aug.spec.nominal_vector();
    const double   N     = *sc.horizon;
    const TimeGrid grid  = TimeGrid::covering(N, default_dt(aug.eval(theta).A, N));
    return l2_energy(sensitivity_ode(aug, 0, theta, sc.input, grid), N).value;
}

}  // namespace

CheckResult check_theorem2_population(const CheckOptions& options) {
    Stopwatch   clock;
    CheckResult res{2, "thm2: exact Gramian energy and dominance", true, false, "", 0.0};
    std::size_t exact_fail = 0, dominance_fail = 0, tight_fail = 0;
    double      worst_exact = 0.0, worst_tight = 0.0;

    for (std::size_t s = 0; s < options.population; ++s) {
        const int        n     = 1 + static_cast<int>(s % 6);
        Scenario         sc    = random_stable_initial_condition(n, 2000 + s, kDelta);
        AugmentedSystem  aug   = build_augmented(sc.truth, sc.estimate);
        const Vector     theta = aug.spec.nominal_vector();
        const RealSystem sys   = aug.eval(theta);
        const Matrix     P     = lyap_observability(sys.A, sys.C.transpose() * sys.C).P;

        const Vector dx0   = aug.xbar0.partial(0, theta).col(0);
        const double exact = dx0.dot(P * dx0);
        const double gt    = ground_truth_energy(aug, sc);
        const double bound = theorem2_bound(aug, 0, theta);
        worst_exact        = std::max(worst_exact, rel_diff(gt, exact));
        if (rel_diff(gt, exact) > 1e-5) ++exact_fail;
        if (bound < gt) ++dominance_fail;

        // Same system with ∂x̄₀/∂θ along the top eigenvector of P.
        const SymmetricEigen eig = sym_eig(P);
        const Vector         top = eig.vectors.col(eig.vectors.cols() - 1);
        const Eigen::Index   half = sys.A.rows() / 2;
        const Monomial       th   = Monomial::variable(0);
        const Matrix         base = sc.truth.x0.eval(Vector::Zero(1));
        sc.truth.x0    = ParamMatrix::constant(base).with_term(th, top.head(half));
        sc.estimate.x0 = ParamMatrix::constant(base).with_term(th, top.tail(half));
        aug            = build_augmented(sc.truth, sc.estimate);
        const double gt_top    = ground_truth_energy(aug, sc);
        const double bound_top = theorem2_bound(aug, 0, theta);
        worst_tight            = std::max(worst_tight, rel_diff(bound_top, gt_top));
        if (rel_diff(bound_top, gt_top) > 1e-6) ++tight_fail;
    }
    res.seconds = clock.seconds();
    res.passed  = exact_fail == 0 && dominance_fail == 0 && tight_fail == 0 && res.seconds < 30.0;
    res.detail  = std::to_string(options.population) + " systems: exact-energy failures " + std::to_string(exact_fail) +
                 " (max rel " + fmt(worst_exact) + "), dominance failures " + std::to_string(dominance_fail) +
                 ", top-eigenvector tightness failures " + std::to_string(tight_fail) + " (max rel " +
                 fmt(worst_tight) + "), " + fmt(res.seconds) + " s";
    return res;
}

// 3, 4, 8 -------------------------------------------------------------------

std::vector<CheckResult> check_theorem1_population(const CheckOptions& options) {
    Stopwatch   clock;
    std::size_t thm1_ok = 0, baseline_ok = 0, thm1_tighter = 0;
    double      min_ratio_thm1 = INFINITY, min_ratio_baseline = INFINITY;

    AnalysisOptions analysis;
    analysis.mode = AnalysisMode::strict;
    for (std::size_t s = 0; s < options.population; ++s) {
        Scenario sc = random_stable_augmented(2 + static_cast<int>(s % 3), 3000 + s, kDelta);
        sc.fd_step  = 1e-5;
        const ScenarioAnalysis a = analyze_scenario(sc, analysis);
        const BoundReport&     r = a.reports.front();
        if (*r.theorem1 >= r.ground_truth_energy) ++thm1_ok;
        if (*r.gramian_baseline >= r.ground_truth_energy) ++baseline_ok;
        if (*r.theorem1 <= *r.gramian_baseline) ++thm1_tighter;
        min_ratio_thm1     = std::min(min_ratio_thm1, *r.theorem1 / r.ground_truth_energy);
        min_ratio_baseline = std::min(min_ratio_baseline, *r.gramian_baseline / r.ground_truth_energy);
    }
    const double seconds = clock.seconds();
    const auto   total   = std::to_string(options.population);

    CheckResult c3{3, "thm1 dominance over ground truth (mu = -0.5, step input, N = 12/|mu|)", false, false, "",
                   seconds};
    c3.passed = thm1_ok == options.population && seconds < 120.0;
    c3.detail = std::to_string(thm1_ok) + "/" + total + " dominated, min bound/truth " + fmt(min_ratio_thm1) + ", " +
                fmt(seconds) + " s";

    CheckResult c4{4, "Gramian baseline dominance over ground truth", false, false, "", seconds};
    c4.passed = baseline_ok == options.population;
    c4.detail = std::to_string(baseline_ok) + "/" + total + " dominated, min bound/truth " + fmt(min_ratio_baseline);

    CheckResult c8{8, "conservatism: thm1 <= Gramian baseline (informational)", true, true, "", seconds};
    c8.detail = "thm1 tighter in " + std::to_string(thm1_tighter) + "/" + total + " cases (fraction " +
                fmt(static_cast<double>(thm1_tighter) / static_cast<double>(options.population)) + ")";
    return {c3, c4, c8};
}

// 5 -------------------------------------------------------------------------

CheckResult check_oracle_agreement(const CheckOptions& options) {
    Stopwatch   clock;
    CheckResult res{5, "oracle agreement: sensitivity ODE vs central differences", true, false, "", 0.0};
    std::size_t cases = 0, mismatches = 0, order_fail = 0;
    double      worst_rel = 0.0, worst_ratio = INFINITY;

    std::vector<Scenario> scenarios = paper_scenarios();
    for (std::size_t s = 0; s < options.population; ++s)
        scenarios.push_back(random_stable_augmented(2 + static_cast<int>(s % 3), 3000 + s, kDelta));
    const std::size_t preset_count = paper_scenarios().size();

    for (std::size_t idx = 0; idx < scenarios.size(); ++idx) {
        const Scenario&       sc    = scenarios[idx];
        const AugmentedSystem aug   = build_augmented(sc.truth, sc.estimate);
        const Vector          theta = aug.spec.nominal_vector();
        const RealSystem      sys   = aug.eval(theta);
        double                N     = sc.horizon.value_or(0.0);
        if (!sc.horizon) {
            const double mu = log_norm(sys.A).mu;
            N = std::log(1e6) / std::abs(mu < 0.0 ? mu : lyapunov_preconditioner(sys.A).mu_after);
        }
        const TimeGrid grid = TimeGrid::covering(N, default_dt(sys.A, N));

        for (std::size_t i : sc.params_of_interest) {
            ++cases;
            const SensitivityTrajectory ode = sensitivity_ode(aug, i, theta, sc.input, grid);
            const double e_ode = l2_energy(ode, N).value;
            const double e_fd  = l2_energy(sensitivity_fd(aug, i, theta, 1e-5, sc.input, grid), N).value;
            const double rel   = std::abs(e_ode - e_fd) / std::max(e_ode, 1e-12);
            worst_rel          = std::max(worst_rel, rel);
            if (rel > 1e-3) ++mismatches;

            // Convergence order: presets and the first ten random systems.
            if (idx >= preset_count + 10) continue;
            std::vector<double> errs;
            for (double h : {1e-3, 5e-4, 2.5e-4}) {
                const SensitivityTrajectory fd = sensitivity_fd(aug, i, theta, h, sc.input, grid);
                Trajectory                  diff{ode.trajectory.times, {}};
                for (std::size_t k = 0; k < fd.trajectory.size(); ++k)
                    diff.values.push_back(fd.trajectory.values[k] - ode.trajectory.values[k]);
                errs.push_back(std::sqrt(l2_energy(diff, N).value));
            }
            // Output polynomial in θ (parameter-free dynamics, polynomial x0 of
            // degree ≤ 2): the central difference is exact up to round-off.
            if (aug.dynamics_parameter_free() && aug.xbar0.degree() <= 2) {
                if (errs.front() > 1e-9 * std::sqrt(std::max(e_ode, 1e-300))) ++order_fail;
                continue;
            }
            const double r1 = errs[0] / errs[1];
            const double r2 = errs[1] / errs[2];
            worst_ratio     = std::min({worst_ratio, r1, r2});
            if (r1 < 3.5 || r2 < 3.5) ++order_fail;
        }
    }
    res.seconds = clock.seconds();
    res.passed  = mismatches == 0 && order_fail == 0;
    res.detail  = std::to_string(cases) + " (scenario, parameter) cases: energy mismatches " +
                 std::to_string(mismatches) + " (max rel " + fmt(worst_rel) + "), order failures " +
                 std::to_string(order_fail) + " (min halving ratio " + fmt(worst_ratio) + "), " +
                 fmt(res.seconds) + " s";
    return res;
}

// 6 -------------------------------------------------------------------------

CheckResult check_closed_forms(const CheckOptions&) {
    Stopwatch   clock;
    CheckResult res{6, "closed forms: integrals, scalar Gramian, Lyapunov residuals", true, false, "", 0.0};
    std::ostringstream notes;

    double worst_integral = 0.0;
    for (double mu : {1.0, 2.0}) {
        const AppendixAIntegrals closed = appendixA_integrals(mu);
        const std::size_t        m      = std::size_t{1} << 17;
        const double             T      = 200.0 / mu;
        const double             h      = T / static_cast<double>(m);
        std::vector<double>      f3(m + 1), f2(m + 1), f2h(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            const double t = h * static_cast<double>(k);
            f3[k]          = t * t * t * std::exp(-mu * t);
            f2[k]          = t * t * std::exp(-mu * t);
            f2h[k]         = t * t * std::exp(-2.0 * mu * t);
        }
        worst_integral = std::max({worst_integral, rel_diff(simpson(f3, h), closed.I3),
                                   rel_diff(simpson(f2, h), closed.I2), rel_diff(simpson(f2h, h), closed.I2_half)});
    }
    const bool integrals_ok = worst_integral <= 1e-9;
    notes << "integrals max rel " << fmt(worst_integral);

    const double gram     = gramian_finite(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0), 2.0)(0, 0);
    const double gram_err = std::abs(gram - (1.0 - std::exp(-4.0)) / 2.0);
    const bool   gram_ok  = gram_err <= 1e-8;
    notes << ", scalar Gramian abs err " << fmt(gram_err);

    double worst_residual = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng    rng(4000 + s);
        Matrix A = rng.uniform_matrix(4, 4, -1.0, 1.0);
        A -= (spectral_abscissa(A) + kDelta) * Matrix::Identity(4, 4);
        const Matrix C   = rng.uniform_matrix(2, 4, -1.0, 1.0);
        const Matrix Q   = C.transpose() * C;
        const auto   sol = lyap_observability(A, Q);
        worst_residual   = std::max(worst_residual, sol.residual / (norm2(A) * norm2(sol.P) + norm2(Q)));
    }
    const bool lyap_ok = worst_residual <= 1e-8;
    notes << ", Lyapunov max relative residual " << fmt(worst_residual);

    res.passed  = integrals_ok && gram_ok && lyap_ok;
    res.seconds = clock.seconds();
    res.detail  = notes.str();
    return res;
}

// 7 -------------------------------------------------------------------------

CheckResult check_metric_contract(const CheckOptions&) {
    Stopwatch   clock;
    CheckResult res{7, "metric contract: R = 1 at zero sensitivity, R in (0,1], strictly decreasing", true, false, "",
                    0.0};
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::vector<DistanceTerm> zero_terms{{0.5, 0.0, 1.0}, {2.0, 0.0, 0.3}};
    const bool zero_ok = robustness_metric(robustness_distance(zero_terms)) == 1.0;

    std::size_t range_fail = 0;
    for (int k = 0; k < 10000; ++k) {
        const double d = std::pow(10.0, -12.0 + 24.0 * unit(gen)) * (k % 100 == 0 ? 0.0 : 1.0);
        const double R = robustness_metric(d);
        if (!(R > 0.0 && R <= 1.0)) ++range_fail;
        if ((R == 1.0) != (d == 0.0) && d > 1e-15) ++range_fail;
    }

    std::size_t monotone_fail = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<DistanceTerm> terms;
        const int                 p = 1 + k % 4;
        for (int i = 0; i < p; ++i) terms.push_back({0.1 + unit(gen), unit(gen), 0.1 + unit(gen)});
        const double before = robustness_metric(robustness_distance(terms));
        auto         bumped = terms;
        bumped[static_cast<std::size_t>(k % p)].sens_norm += 1e-3 + unit(gen);
        const double after = robustness_metric(robustness_distance(bumped));
        if (!(after < before)) ++monotone_fail;
    }
    res.passed  = zero_ok && range_fail == 0 && monotone_fail == 0;
    res.seconds = clock.seconds();
    res.detail  = std::string("zero sensitivity R==1: ") + (zero_ok ? "yes" : "no") + ", range failures " +
                 std::to_string(range_fail) + "/10000, monotonicity failures " + std::to_string(monotone_fail) +
                 "/1000";
    return res;
}

// 9 -------------------------------------------------------------------------

CheckResult check_determinism(const CheckOptions& options) {
    Stopwatch   clock;
    CheckResult res{9, "determinism: identical config and seed give byte-identical summary.csv", true, false, "", 0.0};
    const std::filesystem::path root =
        options.scratch_dir.empty() ? std::filesystem::temp_directory_path() / "robest_determinism" : options.scratch_dir;

    auto read = [](const std::filesystem::path& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };

    std::string outputs[2];
    for (int pass = 0; pass < 2; ++pass) {
        RunConfig cfg;
        cfg.scenarios = {paper_scenario("affine"), paper_scenario("x0_quadratic"), random_stable_augmented(3, 42, kDelta)};
        cfg.seed      = 42;
        cfg.out_dir   = root / ("pass" + std::to_string(pass));
        cfg.write_trajectories = false;
        std::filesystem::remove_all(cfg.out_dir);
        run(cfg);
        outputs[pass] = read(cfg.out_dir / "summary.csv");
    }
    res.passed  = !outputs[0].empty() && outputs[0] == outputs[1];
    res.seconds = clock.seconds();
    res.detail  = "summary.csv " + std::to_string(outputs[0].size()) + " bytes, " +
                 (res.passed ? "identical" : "differs") + " across two runs";
    return res;
}

std::vector<CheckResult> run_property_suites(const CheckOptions& options) {
    std::vector<CheckResult> out;
    out.push_back(check_exponential_envelopes(options));
    out.push_back(check_theorem2_population(options));
    for (auto& r : check_theorem1_population(options)) out.push_back(std::move(r));
    out.push_back(check_oracle_agreement(options));
    out.push_back(check_closed_forms(options));
    out.push_back(check_metric_contract(options));
    out.push_back(check_determinism(options));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

}  // namespace robest

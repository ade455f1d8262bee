#include "robest/bounds.hpp"

#include <cmath>
#include <sstream>

#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "robest/sensitivity.hpp"

namespace robest {

namespace {

void check_index(const AugmentedSystem& aug, std::size_t index, const char* op) {
    if (index >= aug.spec.size()) {
        std::ostringstream os;
        os << op << ": parameter index " << index << " out of range (p = " << aug.spec.size() << ")";
        detail::reject(os.str());
    }
}

[[noreturn]] void reject_log_norm(double mu) {
    std::ostringstream os;
    os.precision(6);
    os << "log-norm of Abar is " << mu
       << " >= 0; the bound needs a decaying log-norm. Run in preconditioned mode (--mode precond) to evaluate it in "
          "Lyapunov coordinates.";
    detail::reject(os.str());
}

}  // namespace

BoundConstants theorem1_constants(const Matrix& Cbar, const Vector& xbar0, double mu) {
    if (!(mu < 0.0)) reject_log_norm(mu);
    const double m   = std::abs(mu);
    const double ctc = norm2(Cbar.transpose() * Cbar);
    const double x0  = xbar0.norm();
    BoundConstants k;
    k.mu      = mu;
    k.x0_norm = x0;
    k.K1      = ctc * x0 * x0 / (4.0 * m * m * m);
    k.K2      = 2.0 * x0 * ctc / std::pow(m, 5);
    k.K3      = norm2(Cbar) / m;
    return k;
}

TheoremOneTerms theorem1_terms(const AugmentedSystem& aug, std::size_t index, const Vector& theta, double bu_inf,
                               double horizon) {
    check_index(aug, index, "theorem1_bound");
    if (!(horizon > 0.0)) detail::reject("theorem1_bound: horizon must be positive");
    if (!(bu_inf >= 0.0)) detail::reject("theorem1_bound: bu_inf must be nonnegative");

    const RealSystem sys = aug.eval(theta);
    const double     dA  = norm2(aug.Abar.partial(index, theta));
    const double     mu  = log_norm(sys.A).mu;

    TheoremOneTerms terms;
    if (dA == 0.0) {
        terms.constants.mu      = mu;
        terms.constants.N       = horizon;
        terms.constants.bu_inf  = bu_inf;
        terms.constants.x0_norm = sys.x0.norm();
        return terms;
    }
    terms.constants         = theorem1_constants(sys.C, sys.x0, mu);
    terms.constants.N       = horizon;
    terms.constants.dA_norm = dA;
    terms.constants.bu_inf  = bu_inf;

    const auto& k       = terms.constants;
    terms.free_response = k.K1 * dA * dA;
    terms.mixed         = k.K2 * dA * dA * dA * bu_inf;
    terms.forced        = k.K3 * horizon * horizon * dA * dA * bu_inf;
    return terms;
}

double theorem1_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta, double bu_inf,
                      double horizon) {
    return theorem1_terms(aug, index, theta, bu_inf, horizon).total();
}

double theorem2_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta, bool strict) {
    check_index(aug, index, "theorem2_bound");
    if (strict && !aug.dynamics_parameter_free()) {
        detail::reject(
            "theorem2_bound: system matrices depend on the parameters; the initial-condition bound assumes "
            "parameter-free dynamics (use theorem1, or disable strict mode to compute it out of hypothesis)");
    }
    const RealSystem sys = aug.eval(theta);
    const Vector     dx0 = aug.xbar0.partial(index, theta).col(0);
    if (dx0.isZero(0.0)) return 0.0;
    const LyapunovSolution lyap = lyap_observability(sys.A, sys.C.transpose() * sys.C);
    return std::max(0.0, sym_eig_max(lyap.P)) * dx0.squaredNorm();
}

double gramian_baseline_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta,
                              const Trajectory& x_traj, double horizon) {
    check_index(aug, index, "gramian_baseline_bound");
    if (!(horizon > 0.0)) detail::reject("gramian_baseline_bound: horizon must be positive");
    const RealSystem sys = aug.eval(theta);
    const Matrix     dA  = aug.Abar.partial(index, theta);
    if (x_traj.size() < 2 || x_traj.times.back() < horizon * (1.0 - 1e-12))
        detail::reject("gramian_baseline_bound: state trajectory is shorter than the horizon");
    if (x_traj.values.front().size() != sys.A.rows())
        detail::reject("gramian_baseline_bound: state trajectory has the wrong dimension");
    if (dA.isZero(0.0)) return 0.0;

    Trajectory w{x_traj.times, {}};
    w.values.reserve(x_traj.size());
    for (const auto& x : x_traj.values) w.values.push_back(dA * x);
    const double w_energy = l2_energy(w, horizon).value;
    const double trace    = gramian_finite(sys.A, sys.C, horizon).trace();
    return horizon * trace * w_energy;
}

double special_case_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta, SpecialCase mode,
                          double bu_inf, double horizon) {
    switch (mode) {
        case SpecialCase::free_response: {
            if (bu_inf != 0.0) detail::reject("special_case_bound: free-response case requires bu_inf = 0");
            return theorem1_terms(aug, index, theta, 0.0, horizon).free_response;
        }
        case SpecialCase::forced_only: {
            aug.spec.check(theta);
            if (!aug.xbar0.eval(theta).isZero(0.0))
                detail::reject("special_case_bound: forced-only case requires xbar(0) = 0");
            return theorem1_terms(aug, index, theta, bu_inf, horizon).forced;
        }
    }
    detail::reject("special_case_bound: unknown mode");
}

AppendixAIntegrals appendixA_integrals(double mu_abs) {
    if (!(mu_abs > 0.0)) detail::reject("appendixA_integrals: |mu| must be positive");
    const double m = mu_abs;
    return {6.0 / (m * m * m * m), 2.0 / (m * m * m), 1.0 / (4.0 * m * m * m)};
}

Preconditioner lyapunov_preconditioner(const Matrix& Abar) {
    const Eigen::Index     n    = Abar.rows();
    const LyapunovSolution lyap = lyap_observability(Abar, Matrix::Identity(n, n));
    const SymmetricEigen   eig  = sym_eig(lyap.P);
    if (!(eig.values.minCoeff() > 0.0)) throw NumericalError("lyapunov_preconditioner: P is not positive definite");

    Preconditioner pre;
    pre.T                = sqrtm_psd(lyap.P);
    pre.condition_number = std::sqrt(eig.values.maxCoeff() / eig.values.minCoeff());
    pre.mu_before        = log_norm(Abar).mu;
    pre.mu_after         = log_norm(pre.T * Abar * pre.T.inverse()).mu;
    return pre;
}

}  // namespace robest

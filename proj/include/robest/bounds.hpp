#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "robest/systems.hpp"

namespace robest {

/// Constants entering the parameter-dependent-A bound, plus the quantities they
/// multiply.
struct BoundConstants {
    double K1      = 0.0;
    double K2      = 0.0;
    double K3      = 0.0;
    double mu      = 0.0;  ///< log-norm of Ā(θ*)
    double N       = 0.0;  ///< horizon
    double dA_norm = 0.0;  ///< ‖∂Ā/∂θᵢ‖₂
    double bu_inf  = 0.0;  ///< ‖B̄u‖_∞
    double x0_norm = 0.0;  ///< ‖x̄(0)‖₂
};

/// Per-parameter bound values next to the simulated ground truth.
struct BoundReport {
    std::size_t           param_index = 0;
    std::string           param_name;
    double                theta_star = 0.0;
    std::optional<double> theorem1;
    std::optional<double> theorem2;
    std::optional<double> gramian_baseline;
    double                ground_truth_energy = 0.0;  ///< sensitivity-ODE route
    std::optional<double> ground_truth_energy_fd;     ///< central-difference route
    BoundConstants        constants;
    bool                  transformed_coordinates = false;  ///< theorem1 evaluated after the Lyapunov preconditioner
    double                transform_condition     = 1.0;    ///< cond₂(T) when transformed
    std::vector<std::string> flags;
};

/// The three additive contributions of the parameter-dependent-A bound.
struct TheoremOneTerms {
    BoundConstants constants;
    double         free_response = 0.0;  ///< K₁‖∂Ā‖²
    double         mixed         = 0.0;  ///< K₂‖∂Ā‖³‖B̄u‖_∞
    double         forced        = 0.0;  ///< K₃N²‖∂Ā‖²‖B̄u‖_∞

    double total() const { return free_response + mixed + forced; }
};

/// K₁ = ‖C̄ᵀC̄‖‖x̄₀‖²/(4|μ|³), K₂ = 2‖x̄₀‖‖C̄ᵀC̄‖/|μ|⁵, K₃ = ‖C̄‖/|μ|. Requires μ < 0.
BoundConstants theorem1_constants(const Matrix& Cbar, const Vector& xbar0, double mu);

/// Evaluates each term at θ. Rejects μ(Ā(θ)) ≥ 0 unless ∂Ā/∂θᵢ vanishes.
TheoremOneTerms theorem1_terms(const AugmentedSystem& aug, std::size_t index, const Vector& theta, double bu_inf,
                               double horizon);

/// Upper bound on ∫₀ᴺ‖∂ȳ/∂θᵢ‖² for parameter-dependent Ā:
/// K₁‖∂Ā/∂θᵢ‖² + K₂‖∂Ā/∂θᵢ‖³‖B̄u‖_∞ + K₃N²‖∂Ā/∂θᵢ‖²‖B̄u‖_∞.
double theorem1_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta, double bu_inf,
                      double horizon);

/// λ_max(P)‖∂x̄(0)/∂θᵢ‖² with ĀᵀP + PĀ = −C̄ᵀC̄. In strict mode rejects
/// systems whose matrices depend on θ.
double theorem2_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta, bool strict = true);

/// N·trace(Q̄ₒ(N))·‖w̄‖²_{L²[0,N]} with w̄ = (∂Ā/∂θᵢ)x̄ sampled along x_traj.
double gramian_baseline_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta,
                              const Trajectory& x_traj, double horizon);

enum class SpecialCase {
    free_response,  ///< u = 0
    forced_only,    ///< x̄(0) = 0
};

double special_case_bound(const AugmentedSystem& aug, std::size_t index, const Vector& theta, SpecialCase mode,
                          double bu_inf, double horizon);

/// Closed forms of ∫₀^∞ t³e^{−|μ|t}, ∫₀^∞ t²e^{−|μ|t}, ∫₀^∞ t²e^{−2|μ|t}.
struct AppendixAIntegrals {
    double I3      = 0.0;
    double I2      = 0.0;
    double I2_half = 0.0;
};
AppendixAIntegrals appendixA_integrals(double mu_abs);

/// Similarity transform T = P^{1/2}, ĀᵀP + PĀ = −I, under which a Hurwitz Ā
/// has log-norm −1/(2λ_max(P)) < 0.
struct Preconditioner {
    Matrix T;
    double condition_number = 1.0;
    double mu_before        = 0.0;
    double mu_after         = 0.0;
};
Preconditioner lyapunov_preconditioner(const Matrix& Abar);

}  // namespace robest

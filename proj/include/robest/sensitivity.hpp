#pragma once

#include <cstddef>

#include "robest/systems.hpp"

namespace robest {

/// Samples of ∂ȳ/∂θᵢ on a simulation grid.
struct SensitivityTrajectory {
    std::size_t param_index = 0;
    Trajectory  trajectory;
};

/// ∫₀ᴺ ‖∂ȳ/∂θᵢ‖² dt.
struct SensitivityEnergy {
    double value = 0.0;
};

/// Exact route: integrates [x̄; z̄] with ż̄ = Āz̄ + (∂Ā/∂θᵢ)x̄ + (∂B̄/∂θᵢ)u,
/// z̄(0) = ∂x̄(0)/∂θᵢ, and samples C̄z̄ + (∂C̄/∂θᵢ)x̄ + (∂D̄/∂θᵢ)u.
SensitivityTrajectory sensitivity_ode(const AugmentedSystem& aug, std::size_t index, const Vector& theta,
                                      const InputSignal& u, const TimeGrid& grid);

/// Central difference (ȳ(θ+hεᵢ) − ȳ(θ−hεᵢ)) / 2h. Both perturbed systems are
/// simulated jointly, carrying the difference of their states directly.
SensitivityTrajectory sensitivity_fd(const AugmentedSystem& aug, std::size_t index, const Vector& theta, double h,
                                     const InputSignal& u, const TimeGrid& grid);

/// Default central-difference step, max(1e-6, 1e-5·|θᵢ*|).
double default_fd_step(double theta_i);

/// Simpson quadrature of ‖s(t)‖² over [0, N]. The grid must reach N.
SensitivityEnergy l2_energy(const Trajectory& s, double horizon);
inline SensitivityEnergy l2_energy(const SensitivityTrajectory& s, double horizon) {
    return l2_energy(s.trajectory, horizon);
}

}  // namespace robest

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "robest/param_algebra.hpp"
#include "robest/types.hpp"

namespace robest {

/// A, B, C, D and x(0) evaluated at one θ.
struct RealSystem {
    Matrix A, B, C, D;
    Vector x0;
};

/// ẋ = A(θ)x + B(θ)u,  y = C(θ)x + D(θ)u,  x(0) = x0(θ).
struct StateSpace {
    ParamMatrix     A, B, C, D;
    ParamVector     x0;
    ParamVectorSpec spec;

    /// Rejects nonconforming shapes or polynomials referencing unknown parameters.
    void validate() const;

    Eigen::Index order() const { return A.rows(); }
    Eigen::Index inputs() const { return B.cols(); }
    Eigen::Index outputs() const { return C.rows(); }

    RealSystem eval(const Vector& theta) const;
};

/// Truth and estimate stacked so that the output is the estimation error
/// ȳ = y − ỹ:  Ā = diag(A, Ã), B̄ = [B; B̃], C̄ = [C, −C̃], D̄ = D − D̃.
struct AugmentedSystem {
    ParamMatrix     Abar, Bbar, Cbar, Dbar;
    ParamVector     xbar0;
    ParamVectorSpec spec;

    Eigen::Index order() const { return Abar.rows(); }

    RealSystem eval(const Vector& theta) const;

    /// Every matrix replaced by its exact ∂/∂θ_index at theta.
    RealSystem partial(std::size_t index, const Vector& theta) const;

    /// True when Ā, B̄, C̄ and D̄ are all parameter-free.
    bool dynamics_parameter_free() const;
};

AugmentedSystem build_augmented(const StateSpace& truth, const StateSpace& estimate);

/// Coordinate change x̂ = T x̄ with constant T. The output ȳ is unchanged.
AugmentedSystem similarity_transform(const AugmentedSystem& aug, const Matrix& T);

// ---------------------------------------------------------------------------

struct ZeroInput {
    Eigen::Index channels = 1;
};
struct StepInput {
    Vector amplitude;
};
/// u(t) = amplitude · sin(frequency · t)
struct SinusoidInput {
    Vector amplitude;
    double frequency = 1.0;  ///< rad/time
};
/// u(t) = values[j] on [breakpoints[j], breakpoints[j+1]); the last value holds
/// afterwards. breakpoints[0] must be 0.
struct PiecewiseInput {
    std::vector<double> breakpoints;
    std::vector<Vector> values;
};

class InputSignal {
   public:
    using Kind = std::variant<ZeroInput, StepInput, SinusoidInput, PiecewiseInput>;

    InputSignal() : kind_(ZeroInput{}) {}
    explicit InputSignal(Kind kind);

    static InputSignal zero(Eigen::Index channels) { return InputSignal(ZeroInput{channels}); }
    static InputSignal step(Vector amplitude) { return InputSignal(StepInput{std::move(amplitude)}); }
    static InputSignal sinusoid(Vector amplitude, double frequency) {
        return InputSignal(SinusoidInput{std::move(amplitude), frequency});
    }
    static InputSignal piecewise(std::vector<double> breakpoints, std::vector<Vector> values) {
        return InputSignal(PiecewiseInput{std::move(breakpoints), std::move(values)});
    }

    Eigen::Index channels() const;
    Vector       operator()(double t) const;
    bool         is_zero() const;
    std::string  kind_name() const;
    const Kind&  kind() const { return kind_; }

   private:
    Kind kind_;
};

/// Uniform grid 0 = t₀ < … < t_steps = horizon.
struct TimeGrid {
    double      dt    = 0.0;
    std::size_t steps = 0;

    /// Smallest even step count with spacing ≤ max_dt.
    static TimeGrid covering(double horizon, double max_dt);

    double              horizon() const { return dt * static_cast<double>(steps); }
    double              time(std::size_t k) const { return dt * static_cast<double>(k); }
    std::vector<double> times() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> values;

    std::size_t size() const { return times.size(); }
    double      step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct SimulationResult {
    Trajectory states;
    Trajectory outputs;
};

/// Default step: min(0.05/‖A‖₂, horizon/2000).
double default_dt(const Matrix& A, double horizon);

/// sup over t ∈ [0, N] of ‖B̄(θ)u(t)‖₂ on a uniform grid of at least 2048 points
/// (exact for zero, step and piecewise-constant inputs).
double bu_sup_norm(const AugmentedSystem& aug, const InputSignal& u, const Vector& theta, double horizon);

/// Classical RK4 on ẋ = Ax + Bu with outputs y = Cx + Du sampled on the grid.
SimulationResult simulate(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, const Vector& x0,
                          const InputSignal& u, const TimeGrid& grid);

inline SimulationResult simulate(const RealSystem& sys, const InputSignal& u, const TimeGrid& grid) {
    return simulate(sys.A, sys.B, sys.C, sys.D, sys.x0, u, grid);
}

/// CSV `t,<prefix>1,...,<prefix>m`, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path, const std::string& prefix = "v");

}  // namespace robest

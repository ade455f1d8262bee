#include "robest/sensitivity.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "rk4.hpp"
#include "robest/error.hpp"
#include "robest/linalg.hpp"

namespace robest {

namespace {

void check_step(const Matrix& A, const TimeGrid& grid, const char* op) {
    if (grid.steps == 0 || !(grid.dt > 0.0)) detail::reject(std::string(op) + ": empty time grid");
    const double a = norm2(A);
    if (grid.dt * a > 0.1 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << op << ": step " << grid.dt << " violates dt*||Abar|| <= 0.1 (||Abar|| = " << a << ")";
        detail::reject(os.str());
    }
}

void check_index(const AugmentedSystem& aug, std::size_t index, const char* op) {
    if (index >= aug.spec.size()) {
        std::ostringstream os;
        os << op << ": parameter index " << index << " out of range (p = " << aug.spec.size() << ")";
        detail::reject(os.str());
    }
}

}  // namespace

SensitivityTrajectory sensitivity_ode(const AugmentedSystem& aug, std::size_t index, const Vector& theta,
                                      const InputSignal& u, const TimeGrid& grid) {
    check_index(aug, index, "sensitivity_ode");
    const RealSystem sys = aug.eval(theta);
    const RealSystem d   = aug.partial(index, theta);
    if (u.channels() != sys.B.cols()) detail::reject("sensitivity_ode: input has the wrong number of channels");
    check_step(sys.A, grid, "sensitivity_ode");

    const Eigen::Index n = sys.A.rows();
    const Eigen::Index k = sys.B.cols();
    const Eigen::Index m = sys.C.rows();

    Matrix A2 = Matrix::Zero(2 * n, 2 * n);
    A2.topLeftCorner(n, n)     = sys.A;
    A2.bottomLeftCorner(n, n)  = d.A;
    A2.bottomRightCorner(n, n) = sys.A;
    Matrix B2(2 * n, k);
    B2 << sys.B, d.B;
    Matrix C2(m, 2 * n);
    C2 << d.C, sys.C;
    Vector x2(2 * n);
    x2 << sys.x0, d.x0;

    SimulationResult sim = detail::integrate_rk4(A2, B2, C2, d.D, x2, u, grid);
    return {index, std::move(sim.outputs)};
}

SensitivityTrajectory sensitivity_fd(const AugmentedSystem& aug, std::size_t index, const Vector& theta, double h,
                                     const InputSignal& u, const TimeGrid& grid) {
    check_index(aug, index, "sensitivity_fd");
    if (!(h > 0.0)) detail::reject("sensitivity_fd: step h must be positive");
    aug.spec.check(theta);

    Vector plus  = theta;
    Vector minus = theta;
    plus[static_cast<Eigen::Index>(index)] += h;
    minus[static_cast<Eigen::Index>(index)] -= h;
    const RealSystem sp = aug.eval(plus);
    const RealSystem sm = aug.eval(minus);
    if (u.channels() != sp.B.cols()) detail::reject("sensitivity_fd: input has the wrong number of channels");
    check_step(sp.A, grid, "sensitivity_fd");
    check_step(sm.A, grid, "sensitivity_fd");

    // Integrate [x₋; x₊ − x₋] instead of subtracting two separate runs. RK4
    // commutes with this constant change of variables, so the result equals
    // the difference of the two runs in exact arithmetic, while round-off now
    // scales with the difference rather than with the states. The matrix
    // differences are formed term by term for the same reason.
    const Eigen::Index n  = sm.A.rows();
    const Matrix       dA = aug.Abar.difference(plus, minus);
    const Matrix       dB = aug.Bbar.difference(plus, minus);
    const Matrix       dC = aug.Cbar.difference(plus, minus);
    const Matrix       dD = aug.Dbar.difference(plus, minus);
    const Vector       dx = aug.xbar0.difference(plus, minus).col(0);

    Matrix A2 = Matrix::Zero(2 * n, 2 * n);
    A2.topLeftCorner(n, n)     = sm.A;
    A2.bottomLeftCorner(n, n)  = dA;
    A2.bottomRightCorner(n, n) = sm.A + dA;
    Matrix B2(2 * n, sm.B.cols());
    B2 << sm.B, dB;
    Matrix C2(sm.C.rows(), 2 * n);
    C2 << dC, sm.C + dC;
    Vector x02(2 * n);
    x02 << sm.x0, dx;

    const SimulationResult diff = detail::integrate_rk4(A2, B2, C2, dD, x02, u, grid);

    SensitivityTrajectory out{index, {diff.outputs.times, {}}};
    out.trajectory.values.reserve(diff.outputs.values.size());
    const double span = plus[static_cast<Eigen::Index>(index)] - minus[static_cast<Eigen::Index>(index)];
    for (const Vector& dy : diff.outputs.values) out.trajectory.values.push_back(dy / span);
    return out;
}

double default_fd_step(double theta_i) { return std::max(1e-6, 1e-5 * std::abs(theta_i)); }

SensitivityEnergy l2_energy(const Trajectory& s, double horizon) {
    if (s.size() < 2) detail::reject("l2_energy: trajectory needs at least two samples");
    if (!(horizon > 0.0)) detail::reject("l2_energy: horizon must be positive");
    const double dt = s.step();
    const double end = s.times.back();
    if (end < horizon * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "l2_energy: trajectory ends at t = " << end << ", before the horizon N = " << horizon;
        detail::reject(os.str());
    }
    // Last sample index at t = N; the grid must contain N as a node.
    const double      ratio = horizon / dt;
    const std::size_t last  = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(last)) > 1e-6 * std::max(1.0, ratio) || last >= s.size())
        detail::reject("l2_energy: horizon does not fall on a grid node");

    std::vector<double> sq(last + 1);
    for (std::size_t k = 0; k <= last; ++k) sq[k] = s.values[k].squaredNorm();
    return {simpson(sq, dt)};
}

}  // namespace robest

#include "robest/systems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "rk4.hpp"

namespace robest {

namespace {

std::string shape(const ParamMatrix& pm) {
    std::ostringstream os;
    os << pm.rows() << "x" << pm.cols();
    return os.str();
}

void expect_shape(const ParamMatrix& pm, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (pm.rows() != rows || pm.cols() != cols) {
        std::ostringstream os;
        os << "state space: " << name << " is " << shape(pm) << ", expected " << rows << "x" << cols;
        detail::reject(os.str());
    }
}

RealSystem evaluate(const ParamMatrix& A, const ParamMatrix& B, const ParamMatrix& C, const ParamMatrix& D,
                    const ParamMatrix& x0, const ParamVectorSpec& spec, const Vector& theta) {
    spec.check(theta);
    return {A.eval(theta), B.eval(theta), C.eval(theta), D.eval(theta), x0.eval(theta).col(0)};
}

}  // namespace

void StateSpace::validate() const {
    const Eigen::Index n = A.rows();
    if (n == 0) detail::reject("state space: empty A");
    expect_shape(A, n, n, "A");
    if (B.rows() != n) expect_shape(B, n, B.cols(), "B");
    if (C.cols() != n) expect_shape(C, C.rows(), n, "C");
    expect_shape(D, C.rows(), B.cols(), "D");
    expect_shape(x0, n, 1, "x0");
    for (const ParamMatrix* pm : {&A, &B, &C, &D, &x0}) {
        if (pm->required_size() > spec.size()) detail::reject("state space: polynomial references an undeclared parameter");
    }
}

RealSystem StateSpace::eval(const Vector& theta) const { return evaluate(A, B, C, D, x0, spec, theta); }

RealSystem AugmentedSystem::eval(const Vector& theta) const {
    return evaluate(Abar, Bbar, Cbar, Dbar, xbar0, spec, theta);
}

RealSystem AugmentedSystem::partial(std::size_t index, const Vector& theta) const {
    spec.check(theta);
    return {Abar.partial(index, theta), Bbar.partial(index, theta), Cbar.partial(index, theta),
            Dbar.partial(index, theta), xbar0.partial(index, theta).col(0)};
}

bool AugmentedSystem::dynamics_parameter_free() const {
    return Abar.is_constant() && Bbar.is_constant() && Cbar.is_constant() && Dbar.is_constant();
}

AugmentedSystem build_augmented(const StateSpace& truth, const StateSpace& estimate) {
    truth.validate();
    estimate.validate();
    if (truth.order() != estimate.order() || truth.inputs() != estimate.inputs() ||
        truth.outputs() != estimate.outputs()) {
        std::ostringstream os;
        os << "build_augmented: truth (n=" << truth.order() << ", k=" << truth.inputs() << ", m=" << truth.outputs()
           << ") and estimate (n=" << estimate.order() << ", k=" << estimate.inputs() << ", m=" << estimate.outputs()
           << ") differ in dimensions";
        detail::reject(os.str());
    }
    if (!(truth.spec == estimate.spec)) detail::reject("build_augmented: truth and estimate use different parameter specs");

    return {block_diag(truth.A, estimate.A),   vstack(truth.B, estimate.B), hstack(truth.C, negate(estimate.C)),
            add(truth.D, negate(estimate.D)), vstack(truth.x0, estimate.x0), truth.spec};
}

AugmentedSystem similarity_transform(const AugmentedSystem& aug, const Matrix& T) {
    const Eigen::Index n = aug.order();
    if (T.rows() != n || T.cols() != n) detail::reject("similarity_transform: T has the wrong size");
    Eigen::FullPivLU<Matrix> lu(T);
    if (!lu.isInvertible()) detail::reject("similarity_transform: T is singular");
    const Matrix Tinv = lu.inverse();
    const Matrix Ik   = Matrix::Identity(aug.Bbar.cols(), aug.Bbar.cols());
    const Matrix Im   = Matrix::Identity(aug.Cbar.rows(), aug.Cbar.rows());
    return {sandwich(T, aug.Abar, Tinv), sandwich(T, aug.Bbar, Ik),     sandwich(Im, aug.Cbar, Tinv), aug.Dbar,
            sandwich(T, aug.xbar0, Matrix::Identity(1, 1)),             aug.spec};
}

// ---------------------------------------------------------------------------

InputSignal::InputSignal(Kind kind) : kind_(std::move(kind)) {
    if (const auto* pw = std::get_if<PiecewiseInput>(&kind_)) {
        if (pw->breakpoints.empty() || pw->breakpoints.size() != pw->values.size())
            detail::reject("piecewise input: need one value per breakpoint");
        if (pw->breakpoints.front() != 0.0) detail::reject("piecewise input: first breakpoint must be 0");
        if (!std::is_sorted(pw->breakpoints.begin(), pw->breakpoints.end()) ||
            std::adjacent_find(pw->breakpoints.begin(), pw->breakpoints.end()) != pw->breakpoints.end())
            detail::reject("piecewise input: breakpoints must be strictly increasing");
        for (const auto& v : pw->values) {
            if (v.size() != pw->values.front().size()) detail::reject("piecewise input: values differ in length");
            if (!v.allFinite()) detail::reject("piecewise input: non-finite value");
        }
    }
    if (const auto* s = std::get_if<SinusoidInput>(&kind_)) {
        if (!std::isfinite(s->frequency) || !s->amplitude.allFinite()) detail::reject("sinusoid input: non-finite parameters");
    }
    if (const auto* s = std::get_if<StepInput>(&kind_)) {
        if (!s->amplitude.allFinite()) detail::reject("step input: non-finite amplitude");
    }
}

Eigen::Index InputSignal::channels() const {
    return std::visit(
        [](const auto& k) -> Eigen::Index {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZeroInput>) return k.channels;
            else if constexpr (std::is_same_v<T, PiecewiseInput>) return k.values.front().size();
            else return k.amplitude.size();
        },
        kind_);
}

Vector InputSignal::operator()(double t) const {
    return std::visit(
        [t](const auto& k) -> Vector {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZeroInput>) return Vector::Zero(k.channels);
            else if constexpr (std::is_same_v<T, StepInput>) return k.amplitude;
            else if constexpr (std::is_same_v<T, SinusoidInput>) return k.amplitude * std::sin(k.frequency * t);
            else {
                auto it = std::upper_bound(k.breakpoints.begin(), k.breakpoints.end(), t);
                auto j  = it == k.breakpoints.begin() ? 0 : (it - k.breakpoints.begin()) - 1;
                return k.values[static_cast<std::size_t>(j)];
            }
        },
        kind_);
}

bool InputSignal::is_zero() const {
    return std::visit(
        [](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZeroInput>) return true;
            else if constexpr (std::is_same_v<T, PiecewiseInput>)
                return std::all_of(k.values.begin(), k.values.end(), [](const Vector& v) { return v.isZero(0.0); });
            else if constexpr (std::is_same_v<T, SinusoidInput>) return k.amplitude.isZero(0.0) || k.frequency == 0.0;
            else return k.amplitude.isZero(0.0);
        },
        kind_);
}

std::string InputSignal::kind_name() const {
    static const char* names[] = {"zero", "step", "sinusoid", "piecewise"};
    return names[kind_.index()];
}

TimeGrid TimeGrid::covering(double horizon, double max_dt) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) detail::reject("time grid: horizon must be positive and finite");
    if (!(max_dt > 0.0)) detail::reject("time grid: step must be positive");
    auto steps = static_cast<std::size_t>(std::ceil(horizon / max_dt - 1e-9));
    steps      = std::max<std::size_t>(steps, 2);
    if (steps % 2 == 1) ++steps;
    return {horizon / static_cast<double>(steps), steps};
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) t[k] = time(k);
    return t;
}

double default_dt(const Matrix& A, double horizon) {
    const double a = norm2(A);
    const double by_horizon = horizon / 2000.0;
    return a > 0.0 ? std::min(0.05 / a, by_horizon) : by_horizon;
}

// ---------------------------------------------------------------------------

double bu_sup_norm(const AugmentedSystem& aug, const InputSignal& u, const Vector& theta, double horizon) {
    if (!(horizon > 0.0)) detail::reject("bu_sup_norm: horizon must be positive");
    aug.spec.check(theta);
    const Matrix B = aug.Bbar.eval(theta);
    if (u.channels() != B.cols()) detail::reject("bu_sup_norm: input has the wrong number of channels");

    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ZeroInput>) return 0.0;
            else if constexpr (std::is_same_v<T, StepInput>) return (B * k.amplitude).norm();
            else if constexpr (std::is_same_v<T, PiecewiseInput>) {
                double sup = 0.0;
                for (std::size_t j = 0; j < k.breakpoints.size() && k.breakpoints[j] <= horizon; ++j)
                    sup = std::max(sup, (B * k.values[j]).norm());
                return sup;
            } else {
                constexpr std::size_t kPoints = 4096;
                double                sup     = 0.0;
                for (std::size_t j = 0; j < kPoints; ++j)
                    sup = std::max(sup, (B * u(horizon * static_cast<double>(j) / (kPoints - 1))).norm());
                // Extrema of sin(ωt) falling inside the window.
                const double w = std::abs(k.frequency);
                if (w > 0.0) {
                    for (double t = std::numbers::pi / (2.0 * w); t <= horizon; t += std::numbers::pi / w)
                        sup = std::max(sup, (B * u(t)).norm());
                }
                return sup;
            }
        },
        u.kind());
}

namespace detail {

// Unchecked RK4 core shared with the sensitivity module.
SimulationResult integrate_rk4(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, const Vector& x0,
                               const InputSignal& u, const TimeGrid& grid) {
    const double dt = grid.dt;
    SimulationResult out;
    out.states.times = grid.times();
    out.outputs.times = out.states.times;
    out.states.values.reserve(grid.steps + 1);
    out.outputs.values.reserve(grid.steps + 1);

    const bool has_input = !u.is_zero();
    Vector     x         = x0;
    Vector     u0        = u(0.0);
    auto       f         = [&](const Vector& state, const Vector& input) -> Vector {
        return has_input ? Vector(A * state + B * input) : Vector(A * state);
    };

    out.states.values.push_back(x);
    out.outputs.values.push_back(C * x + D * u0);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double t    = grid.time(k);
        const Vector umid = u(t + 0.5 * dt);
        const Vector u1   = u(grid.time(k + 1));
        const Vector k1   = f(x, u0);
        const Vector k2   = f(x + 0.5 * dt * k1, umid);
        const Vector k3   = f(x + 0.5 * dt * k2, umid);
        const Vector k4   = f(x + dt * k3, u1);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(x.norm() <= 1e12)) {
            std::ostringstream os;
            os << "simulate: state norm exceeded 1e12 at t = " << grid.time(k + 1) << " (unstable system?)";
            throw NumericalError(os.str());
        }
        out.states.values.push_back(x);
        out.outputs.values.push_back(C * x + D * u1);
        u0 = u1;
    }
    return out;
}

}  // namespace detail

SimulationResult simulate(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, const Vector& x0,
                          const InputSignal& u, const TimeGrid& grid) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() || D.cols() != B.cols() ||
        x0.size() != n)
        detail::reject("simulate: nonconforming system matrices");
    if (u.channels() != B.cols()) detail::reject("simulate: input has the wrong number of channels");
    if (grid.steps == 0 || !(grid.dt > 0.0)) detail::reject("simulate: empty time grid");
    const double a = norm2(A);
    if (grid.dt * a > 0.1 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "simulate: step " << grid.dt << " violates dt*||A|| <= 0.1 (||A|| = " << a << ")";
        detail::reject(os.str());
    }
    return detail::integrate_rk4(A, B, C, D, x0, u, grid);
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path, const std::string& prefix) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.precision(17);
    const Eigen::Index m = traj.values.empty() ? 0 : traj.values.front().size();
    os << "t";
    for (Eigen::Index j = 1; j <= m; ++j) os << ',' << prefix << j;
    os << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << traj.times[k];
        for (Eigen::Index j = 0; j < m; ++j) os << ',' << traj.values[k][j];
        os << '\n';
    }
}

}  // namespace robest

#include "robest/scenarios.hpp"

#include <algorithm>
#include <sstream>

#include "robest/error.hpp"
#include "robest/linalg.hpp"

namespace robest {

void Scenario::validate() const {
    if (name.empty()) detail::reject("scenario: empty name");
    truth.validate();
    estimate.validate();
    (void)build_augmented(truth, estimate);
    if (horizon && !(*horizon > 0.0)) detail::reject("scenario '" + name + "': horizon must be positive");
    if (fd_step && !(*fd_step > 0.0)) detail::reject("scenario '" + name + "': fd_step must be positive");
    if (input.channels() != truth.inputs()) detail::reject("scenario '" + name + "': input channel count differs from B");
    for (std::size_t i : params_of_interest) {
        if (i >= truth.spec.size()) detail::reject("scenario '" + name + "': parameter of interest out of range");
    }
    if (bounds.empty()) detail::reject("scenario '" + name + "': no bound source requested");
}

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix col2(double a, double b) {
    Matrix m(2, 1);
    m << a, b;
    return m;
}

// Common mass-spring pieces: B = [0; 1], C = [1, 0], D = 0.
StateSpace mass_spring(ParamMatrix A, ParamVector x0, const ParamVectorSpec& spec) {
    Matrix C(1, 2);
    C << 1.0, 0.0;
    return {std::move(A), ParamMatrix::constant(col2(0.0, 1.0)), ParamMatrix::constant(C),
            ParamMatrix::zero(1, 1), std::move(x0), spec};
}

// A(θ) = A₀ + A₁θ₁ with A₀ = [0 1; −20 −2], A₁ = [0 0; −5 −0.5].
ParamMatrix truth_affine() {
    return ParamMatrix::constant(mat2(0, 1, -20, -2)).with_term(Monomial::variable(0), mat2(0, 0, -5, -0.5));
}

// Ã(θ) = [0 1; −(c0 + c1θ₁) −(d0 + d1θ₁)].
ParamMatrix estimate_affine(double c0, double c1, double d0, double d1) {
    return ParamMatrix::constant(mat2(0, 1, -c0, -d0)).with_term(Monomial::variable(0), mat2(0, 0, -c1, -d1));
}

const Matrix kA1 = mat2(0, 0, -5, -0.5);

Scenario base(std::string name, std::string description, const ParamVectorSpec& spec) {
    Scenario s;
    s.name        = std::move(name);
    s.description = std::move(description);
    s.input       = InputSignal::step(Vector::Ones(1));
    for (std::size_t i = 0; i < spec.size(); ++i) s.params_of_interest.push_back(i);
    return s;
}

}  // namespace

std::vector<Scenario> paper_scenarios() {
    const ParamVectorSpec one({"theta1"}, {0.5});
    const ParamVectorSpec two({"theta1", "theta2"}, {0.5, 0.5});
    const ParamVector     x0_one = ParamMatrix::constant(col2(1.0, 0.0));
    const std::vector<MetricSource> a_bounds{MetricSource::theorem1, MetricSource::gramian_baseline};

    std::vector<Scenario> out;

    {
        Scenario s = base("affine", "affine dependence on theta1", one);
        s.truth    = mass_spring(truth_affine(), x0_one, one);
        s.estimate = mass_spring(estimate_affine(19.80, 5.10, 2.05, 0.48), x0_one, one);
        s.bounds   = a_bounds;
        out.push_back(std::move(s));
    }
    {
        Scenario s = base("affine_misidentified", "affine dependence, inaccurate parameter identification", one);
        s.truth    = mass_spring(truth_affine(), x0_one, one);
        s.estimate = mass_spring(estimate_affine(19.0, 5.5, 2.2, 0.40), x0_one, one);
        s.bounds   = a_bounds;
        out.push_back(std::move(s));
    }
    {
        Scenario          s = base("quadratic", "quadratic in addition to affine dependence on theta1", one);
        const Monomial    sq = Monomial::variable(0, 2);
        s.truth    = mass_spring(truth_affine().with_term(sq, 0.1 * kA1), x0_one, one);
        s.estimate = mass_spring(estimate_affine(19.80, 5.10, 2.05, 0.48).with_term(sq, 0.1 * kA1), x0_one, one);
        s.bounds   = a_bounds;
        out.push_back(std::move(s));
    }
    {
        Scenario       s     = base("two_param", "dependence on theta1 and theta2 with a joint theta1*theta2 term", two);
        const Monomial th2   = Monomial::variable(1);
        const Monomial joint = Monomial::variable(0) * Monomial::variable(1);
        const Matrix   A2    = mat2(0, 0, -1, -0.1);
        s.truth    = mass_spring(truth_affine().with_term(th2, A2).with_term(joint, 0.05 * kA1), x0_one, two);
        s.estimate = mass_spring(
            estimate_affine(19.80, 5.10, 2.05, 0.48).with_term(th2, A2).with_term(joint, 0.05 * kA1), x0_one, two);
        s.bounds = a_bounds;
        out.push_back(std::move(s));
    }

    // Parameter-free dynamics frozen at θ₁ = 0.
    const ParamMatrix A_fixed  = ParamMatrix::constant(mat2(0, 1, -20, -2));
    const ParamMatrix At_fixed = ParamMatrix::constant(mat2(0, 1, -19.80, -2.05));
    const Monomial    sq       = Monomial::variable(0, 2);
    {
        Scenario s = base("x0_quadratic", "initial condition quadratic in theta1", one);
        s.truth    = mass_spring(A_fixed, ParamMatrix::constant(col2(1, 0)).with_term(sq, col2(0.2, 0)), one);
        s.estimate = mass_spring(At_fixed, ParamMatrix::constant(col2(1, 0)).with_term(sq, col2(0.25, 0)), one);
        s.bounds   = {MetricSource::theorem2};
        out.push_back(std::move(s));
    }
    {
        Scenario       s   = base("x0_two_param", "initial condition depending on theta1 and theta2", two);
        const Monomial th2 = Monomial::variable(1);
        s.truth            = mass_spring(
            A_fixed, ParamMatrix::constant(col2(1, 0)).with_term(sq, col2(0.2, 0)).with_term(th2, col2(0.1, 0)), two);
        s.estimate = mass_spring(
            At_fixed, ParamMatrix::constant(col2(1, 0)).with_term(sq, col2(0.25, 0)).with_term(th2, col2(0.1, 0)),
            two);
        s.bounds = {MetricSource::theorem2};
        out.push_back(std::move(s));
    }
    return out;
}

Scenario paper_scenario(const std::string& name) {
    for (auto& s : paper_scenarios()) {
        if (s.name == name) return s;
    }
    detail::reject("unknown preset scenario '" + name + "'");
}

// ---------------------------------------------------------------------------

Rng::Rng(std::uint64_t seed) : state_(seed) {}

// splitmix64
std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z               = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z               = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
    const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

Matrix Rng::uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(lo, hi);
    return m;
}

namespace {

Matrix perturb(Rng& rng, const Matrix& m, double relative) {
    Matrix out = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) *= 1.0 + rng.uniform(-relative, relative);
    return out;
}

// Shifts the constant term so that μ(A₀ + A₁θ*) = −delta.
Matrix shift_to_log_norm(const Matrix& A0, const Matrix& A1, double theta_star, double delta) {
    const double mu = log_norm(A0 + theta_star * A1).mu;
    return A0 - (mu + delta) * Matrix::Identity(A0.rows(), A0.cols());
}

void check_random_args(int n, double delta) {
    if (n < 1) detail::reject("random scenario: state dimension must be at least 1");
    if (!(delta > 0.0)) detail::reject("random scenario: delta must be positive");
}

std::string random_name(const char* prefix, int n, std::uint64_t seed) {
    std::ostringstream os;
    os << prefix << "_n" << n << "_s" << seed;
    return os.str();
}

}  // namespace

Scenario random_stable_augmented(int n, std::uint64_t seed, double delta) {
    check_random_args(n, delta);
    constexpr double kTheta = 0.5;
    const ParamVectorSpec spec({"theta1"}, {kTheta});
    Rng rng(seed);

    Matrix A0 = rng.uniform_matrix(n, n, -1.0, 1.0);
    Matrix A1 = rng.uniform_matrix(n, n, -1.0, 1.0);
    const double a1 = norm2(A1);
    if (a1 > 0.0) A1 *= 0.1 * norm2(A0) / a1;
    Matrix At0 = perturb(rng, A0, 0.02);
    Matrix At1 = perturb(rng, A1, 0.02);
    A0         = shift_to_log_norm(A0, A1, kTheta, delta);
    At0        = shift_to_log_norm(At0, At1, kTheta, delta);

    const Matrix B  = rng.uniform_matrix(n, 1, -1.0, 1.0);
    const Matrix C  = rng.uniform_matrix(1, n, -1.0, 1.0);
    const Matrix x0 = rng.uniform_matrix(n, 1, -1.0, 1.0);
    const Matrix Bt = perturb(rng, B, 0.02);
    const Matrix Ct = perturb(rng, C, 0.02);

    const Monomial th = Monomial::variable(0);
    Scenario       s;
    s.name        = random_name("random", n, seed);
    s.description = "random stable pair, affine A(theta)";
    s.truth       = {ParamMatrix::constant(A0).with_term(th, A1), ParamMatrix::constant(B), ParamMatrix::constant(C),
               ParamMatrix::zero(1, 1), ParamMatrix::constant(x0), spec};
    s.estimate    = {ParamMatrix::constant(At0).with_term(th, At1), ParamMatrix::constant(Bt),
                  ParamMatrix::constant(Ct), ParamMatrix::zero(1, 1), ParamMatrix::constant(x0), spec};
    s.input       = InputSignal::step(Vector::Ones(1));
    s.horizon     = 12.0 / delta;
    s.params_of_interest = {0};
    s.bounds             = {MetricSource::theorem1, MetricSource::gramian_baseline};
    return s;
}

Scenario random_stable_initial_condition(int n, std::uint64_t seed, double delta) {
    check_random_args(n, delta);
    constexpr double      kTheta = 0.5;
    const ParamVectorSpec spec({"theta1"}, {kTheta});
    Rng                   rng(seed ^ 0x5EEDF00DULL);

    const Matrix zero = Matrix::Zero(n, n);
    const Matrix A    = shift_to_log_norm(rng.uniform_matrix(n, n, -1.0, 1.0), zero, kTheta, delta);
    const Matrix At   = shift_to_log_norm(perturb(rng, A, 0.02), zero, kTheta, delta);
    const Matrix B    = rng.uniform_matrix(n, 1, -1.0, 1.0);
    const Matrix C    = rng.uniform_matrix(1, n, -1.0, 1.0);
    const Matrix Bt   = perturb(rng, B, 0.02);
    const Matrix Ct   = perturb(rng, C, 0.02);
    const Matrix x00  = rng.uniform_matrix(n, 1, -1.0, 1.0);
    const Matrix x01  = rng.uniform_matrix(n, 1, -1.0, 1.0);
    const Matrix xt01 = perturb(rng, x01, 0.1);

    const Monomial th = Monomial::variable(0);
    Scenario       s;
    s.name        = random_name("random_x0", n, seed);
    s.description = "random stable pair, affine x0(theta)";
    s.truth       = {ParamMatrix::constant(A),       ParamMatrix::constant(B), ParamMatrix::constant(C),
               ParamMatrix::zero(1, 1),           ParamMatrix::constant(x00).with_term(th, x01), spec};
    s.estimate    = {ParamMatrix::constant(At),      ParamMatrix::constant(Bt), ParamMatrix::constant(Ct),
                  ParamMatrix::zero(1, 1),          ParamMatrix::constant(x00).with_term(th, xt01), spec};
    s.input       = InputSignal::step(Vector::Ones(1));
    s.horizon     = 12.0 / delta;
    s.params_of_interest = {0};
    s.bounds             = {MetricSource::theorem2};
    return s;
}

}  // namespace robest

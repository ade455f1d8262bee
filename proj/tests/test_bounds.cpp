#include <doctest.h>

#include <cmath>
#include <vector>

#include "robest/bounds.hpp"
#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "robest/scenarios.hpp"
#include "robest/sensitivity.hpp"

using namespace robest;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// ā = a0 + da·θ, c̄ = c, x̄₀ = x0 + dx0·θ, evaluated at θ = 0.
AugmentedSystem scalar_system(double a0, double da, double c, double x0, double dx0) {
    AugmentedSystem aug;
    aug.spec  = ParamVectorSpec({"theta"}, {0.0});
    aug.Abar  = ParamMatrix::constant(scalar(a0)).with_term(Monomial::variable(0), scalar(da));
    aug.Bbar  = ParamMatrix::constant(scalar(1.0));
    aug.Cbar  = ParamMatrix::constant(scalar(c));
    aug.Dbar  = ParamMatrix::zero(1, 1);
    aug.xbar0 = ParamMatrix::constant(scalar(x0)).with_term(Monomial::variable(0), scalar(dx0));
    return aug;
}

// Independent evaluation of the three-term formula.
double reference_theorem1(double cnorm, double x0, double mu, double dA, double bu, double N) {
    const double m  = std::abs(mu);
    const double k1 = cnorm * cnorm * x0 * x0 / (4 * m * m * m);
    const double k2 = 2 * x0 * cnorm * cnorm / std::pow(m, 5);
    const double k3 = cnorm / m;
    return k1 * dA * dA + k2 * dA * dA * dA * bu + k3 * N * N * dA * dA * bu;
}

}  // namespace

TEST_CASE("theorem1 scalar hand example") {
    const auto aug = scalar_system(-2, 0.5, 1, 1, 0);
    const auto t   = theorem1_terms(aug, 0, vec({0.0}), 1.0, 3.0);
    CHECK(t.constants.K1 == doctest::Approx(1.0 / 32));
    CHECK(t.constants.K2 == doctest::Approx(1.0 / 16));
    CHECK(t.constants.K3 == doctest::Approx(0.5));
    CHECK(t.free_response == doctest::Approx(0.0078125));
    CHECK(t.mixed == doctest::Approx(0.0078125));
    CHECK(t.forced == doctest::Approx(1.125));
    CHECK(theorem1_bound(aug, 0, vec({0.0}), 1.0, 3.0) == doctest::Approx(1.140625).epsilon(1e-14));
    CHECK(reference_theorem1(1, 1, -2, 0.5, 1, 3) == doctest::Approx(1.140625).epsilon(1e-14));
}

TEST_CASE("theorem1 matches the reference formula on random scalars") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = -rng.uniform(0.2, 3), da = rng.uniform(-2, 2), c = rng.uniform(-2, 2);
        const double x0 = rng.uniform(-2, 2), bu = rng.uniform(0, 3), N = rng.uniform(0.5, 20);
        const auto   aug = scalar_system(a, da, c, x0, 0);
        CHECK(theorem1_bound(aug, 0, vec({0.0}), bu, N) ==
              doctest::Approx(reference_theorem1(std::abs(c), std::abs(x0), a, std::abs(da), bu, N)).epsilon(1e-12));
    }
}

TEST_CASE("theorem1 gating and degenerate cases") {
    CHECK(theorem1_bound(scalar_system(-2, 0, 1, 1, 0), 0, vec({0.0}), 1.0, 3.0) == 0.0);
    CHECK(theorem1_bound(scalar_system(1, 0, 1, 1, 0), 0, vec({0.0}), 1.0, 3.0) == 0.0);
    try {
        theorem1_bound(scalar_system(0.5, 1, 1, 1, 0), 0, vec({0.0}), 1.0, 3.0);
        FAIL("expected rejection");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("precond") != std::string::npos);
    }
    CHECK_THROWS_AS(theorem1_constants(Matrix::Ones(1, 1), vec({1.0}), 0.0), PreconditionError);
}

TEST_CASE("theorem1 monotonicity and special-case consistency") {
    const auto   aug = scalar_system(-1.5, 0.7, 1.2, 0.8, 0);
    const Vector th  = vec({0.0});
    const double b   = theorem1_bound(aug, 0, th, 1.0, 4.0);
    CHECK(theorem1_bound(aug, 0, th, 1.5, 4.0) >= b);
    CHECK(theorem1_bound(aug, 0, th, 1.0, 5.0) >= b);
    CHECK(theorem1_bound(scalar_system(-1.5, 0.9, 1.2, 0.8, 0), 0, th, 1.0, 4.0) >= b);
    CHECK(theorem1_bound(scalar_system(-1.5, 0.7, 1.2, 1.3, 0), 0, th, 1.0, 4.0) >= b);

    CHECK(special_case_bound(aug, 0, th, SpecialCase::free_response, 0.0, 4.0) ==
          theorem1_bound(aug, 0, th, 0.0, 4.0));
    CHECK(special_case_bound(scalar_system(-2, 0.5, 1, 1, 0), 0, th, SpecialCase::free_response, 0.0, 3.0) ==
          doctest::Approx(0.0078125));
    const auto forced = scalar_system(-1.5, 0.7, 1.2, 0.0, 0);
    CHECK(special_case_bound(forced, 0, th, SpecialCase::forced_only, 2.0, 4.0) ==
          theorem1_bound(forced, 0, th, 2.0, 4.0));
    CHECK(special_case_bound(forced, 0, th, SpecialCase::forced_only, 2.0, 4.0) ==
          theorem1_terms(forced, 0, th, 2.0, 4.0).forced);

    CHECK_THROWS_AS(special_case_bound(aug, 0, th, SpecialCase::free_response, 1.0, 4.0), PreconditionError);
    CHECK_THROWS_AS(special_case_bound(aug, 0, th, SpecialCase::forced_only, 1.0, 4.0), PreconditionError);
}

TEST_CASE("theorem2") {
    SUBCASE("scalar Lyapunov") {
        CHECK(theorem2_bound(scalar_system(-1, 0, 1, 0, 2), 0, vec({0.0})) == doctest::Approx(2.0));
    }
    SUBCASE("parameter-free initial condition") {
        CHECK(theorem2_bound(scalar_system(-1, 0, 1, 3, 0), 0, vec({0.0})) == 0.0);
    }
    SUBCASE("strict mode rejects parameter-dependent dynamics") {
        const auto aug = scalar_system(-1, 0.2, 1, 0, 2);
        CHECK_THROWS_AS(theorem2_bound(aug, 0, vec({0.0}), true), PreconditionError);
        CHECK(theorem2_bound(aug, 0, vec({0.0}), false) == doctest::Approx(2.0));
    }
    SUBCASE("non-Hurwitz rejected") {
        CHECK_THROWS_AS(theorem2_bound(scalar_system(0.1, 0, 1, 0, 2), 0, vec({0.0})), PreconditionError);
    }
    SUBCASE("tight along the top eigenvector of P") {
        Rng rng(103);
        for (int trial = 0; trial < 5; ++trial) {
            Matrix A = rng.uniform_matrix(4, 4, -1, 1);
            A -= (spectral_abscissa(A) + 0.5) * Matrix::Identity(4, 4);
            const Matrix C   = rng.uniform_matrix(2, 4, -1, 1);
            const auto   P   = lyap_observability(A, C.transpose() * C).P;
            const auto   eig = sym_eig(P);
            const Vector v   = eig.vectors.col(3);

            AugmentedSystem aug;
            aug.spec  = ParamVectorSpec({"theta"}, {0.0});
            aug.Abar  = ParamMatrix::constant(A);
            aug.Bbar  = ParamMatrix::zero(4, 1);
            aug.Cbar  = ParamMatrix::constant(C);
            aug.Dbar  = ParamMatrix::zero(2, 1);
            aug.xbar0 = ParamMatrix::zero(4, 1).with_term(Monomial::variable(0), v);

            const double bound = theorem2_bound(aug, 0, vec({0.0}));
            CHECK(bound == doctest::Approx(v.dot(P * v)).epsilon(1e-10));

            const double N    = 60 / std::abs(spectral_abscissa(A));
            const auto   grid = TimeGrid::covering(N, default_dt(A, N));
            const double gt   = l2_energy(sensitivity_ode(aug, 0, vec({0.0}), InputSignal::zero(1), grid), N).value;
            CHECK(gt == doctest::Approx(bound).epsilon(1e-6));
        }
    }
}

TEST_CASE("gramian baseline scalar closed form") {
    const auto   aug  = scalar_system(-1, 1, 1, 1, 0);
    const double N    = 5.0;
    const auto   grid = TimeGrid::covering(N, 1e-3);
    const auto   sim  = simulate(aug.eval(vec({0.0})), InputSignal::zero(1), grid);
    const double g    = (1 - std::exp(-10.0)) / 2;
    CHECK(gramian_baseline_bound(aug, 0, vec({0.0}), sim.states, N) == doctest::Approx(5 * g * g).epsilon(1e-9));
    CHECK(gramian_baseline_bound(scalar_system(-1, 0, 1, 1, 0), 0, vec({0.0}), sim.states, N) == 0.0);
    CHECK_THROWS_AS(gramian_baseline_bound(aug, 0, vec({0.0}), sim.states, 2 * N), PreconditionError);
}

TEST_CASE("dominance on a small random population") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Scenario sc    = random_stable_augmented(2 + seed % 3, 500 + seed, 0.5);
        const auto     aug   = build_augmented(sc.truth, sc.estimate);
        const Vector   theta = sc.truth.spec.nominal_vector();
        const double   N     = *sc.horizon;
        const auto     sys   = aug.eval(theta);
        const auto     grid  = TimeGrid::covering(N, default_dt(sys.A, N));
        const auto     sim   = simulate(sys, sc.input, grid);
        const double   gt    = l2_energy(sensitivity_ode(aug, 0, theta, sc.input, grid), N).value;
        const double   bu    = bu_sup_norm(aug, sc.input, theta, N);
        CHECK(log_norm(sys.A).mu == doctest::Approx(-0.5));
        CHECK(theorem1_bound(aug, 0, theta, bu, N) >= gt);
        CHECK(gramian_baseline_bound(aug, 0, theta, sim.states, N) >= gt);
    }
}

TEST_CASE("decay-moment integrals") {
    const auto a = appendixA_integrals(1.0);
    CHECK(a.I3 == 6.0);
    CHECK(a.I2 == 2.0);
    CHECK(a.I2_half == 0.25);
    const auto b = appendixA_integrals(2.0);
    CHECK(b.I3 == doctest::Approx(0.375));
    CHECK(b.I2 == doctest::Approx(0.25));
    CHECK(b.I2_half == doctest::Approx(0.03125));
    CHECK_THROWS_AS(appendixA_integrals(0.0), PreconditionError);

    for (double m : {0.5, 1.0, 3.0}) {
        const std::size_t   n = 1 << 17;
        const double        h = 200 / m / n;
        std::vector<double> f3, f2, f2h;
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = h * static_cast<double>(k);
            f3.push_back(t * t * t * std::exp(-m * t));
            f2.push_back(t * t * std::exp(-m * t));
            f2h.push_back(t * t * std::exp(-2 * m * t));
        }
        const auto c = appendixA_integrals(m);
        CHECK(simpson(f3, h) == doctest::Approx(c.I3).epsilon(1e-9));
        CHECK(simpson(f2, h) == doctest::Approx(c.I2).epsilon(1e-9));
        CHECK(simpson(f2h, h) == doctest::Approx(c.I2_half).epsilon(1e-9));
    }
}

TEST_CASE("Lyapunov preconditioner") {
    Matrix A0(2, 2);
    A0 << 0, 1, -20, -2;
    const auto pc = lyapunov_preconditioner(A0);
    CHECK(pc.mu_before == doctest::Approx(8.5525).epsilon(1e-4));
    CHECK(pc.mu_after < 0);
    const Matrix P = lyap_observability(A0, Matrix::Identity(2, 2)).P;
    CHECK(pc.mu_after == doctest::Approx(-1 / (2 * sym_eig_max(P))).epsilon(1e-10));
    const Matrix Ahat = pc.T * A0 * pc.T.inverse();
    CHECK(log_norm(Ahat).mu == doctest::Approx(pc.mu_after).epsilon(1e-10));
    CHECK(pc.condition_number >= 1.0);
    CHECK_THROWS_AS(lyapunov_preconditioner(Matrix::Identity(2, 2)), PreconditionError);
}

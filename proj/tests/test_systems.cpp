#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "robest/scenarios.hpp"
#include "robest/systems.hpp"

using namespace robest;

namespace {

Matrix mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> xs) {
    Matrix m(r, c);
    auto   it = xs.begin();
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = *it++;
    return m;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Matrix random_hurwitz(Rng& rng, Eigen::Index n, double margin) {
    Matrix A = rng.uniform_matrix(n, n, -1, 1);
    return A - (spectral_abscissa(A) + margin) * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("build_augmented on the affine preset") {
    const Scenario sc  = paper_scenario("affine");
    const auto     aug = build_augmented(sc.truth, sc.estimate);
    CHECK(aug.Abar.rows() == 4);
    CHECK(aug.Bbar.rows() == 4);
    CHECK(aug.Bbar.cols() == 1);
    CHECK(aug.Cbar.rows() == 1);
    CHECK(aug.Cbar.cols() == 4);

    Matrix expected = Matrix::Zero(4, 4);
    expected.topLeftCorner(2, 2)     = mat(2, 2, {0, 1, -20, -2});
    expected.bottomRightCorner(2, 2) = mat(2, 2, {0, 1, -19.80, -2.05});
    CHECK(aug.eval(vec({0.0})).A.isApprox(expected));
    // Estimate at θ=1.
    CHECK(sc.estimate.A.eval(vec({1.0})).isApprox(mat(2, 2, {0, 1, -24.90, -2.53})));
}

TEST_CASE("build_augmented rejects mismatches") {
    const Scenario sc    = paper_scenario("affine");
    StateSpace     other = sc.estimate;
    other.spec           = ParamVectorSpec({"other"}, {0.5});
    CHECK_THROWS_AS(build_augmented(sc.truth, other), PreconditionError);
    StateSpace wide = sc.estimate;
    wide.C          = ParamMatrix::constant(Matrix::Ones(2, 2));
    CHECK_THROWS_AS(build_augmented(sc.truth, wide), PreconditionError);
}

TEST_CASE("identical truth and estimate give zero error") {
    const Scenario sc   = paper_scenario("affine");
    const auto     aug  = build_augmented(sc.truth, sc.truth);
    const auto     sys  = aug.eval(vec({0.5}));
    const auto     grid = TimeGrid::covering(10.0, default_dt(sys.A, 10.0));
    const auto     sim  = simulate(sys, InputSignal::step(vec({1.0})), grid);
    for (const auto& y : sim.outputs.values) CHECK(y.norm() == 0.0);
}

TEST_CASE("bu_sup_norm") {
    AugmentedSystem aug;
    aug.spec  = ParamVectorSpec({"t"}, {0.0});
    aug.Abar  = ParamMatrix::constant(-Matrix::Identity(4, 4));
    aug.Bbar  = ParamMatrix::constant(mat(4, 1, {0, 1, 0, 1}));
    aug.Cbar  = ParamMatrix::constant(Matrix::Ones(1, 4));
    aug.Dbar  = ParamMatrix::zero(1, 1);
    aug.xbar0 = ParamMatrix::zero(4, 1);
    const Vector th = vec({0.0});
    CHECK(bu_sup_norm(aug, InputSignal::zero(1), th, 5.0) == 0.0);
    CHECK(bu_sup_norm(aug, InputSignal::step(vec({1.0})), th, 5.0) == doctest::Approx(std::sqrt(2.0)));
    // Horizon too short for the first crest of sin: sup is reached at t = N.
    const double sin_short = bu_sup_norm(aug, InputSignal::sinusoid(vec({3.0}), 0.7), th, 1.0);
    CHECK(sin_short == doctest::Approx(3 * std::sqrt(2.0) * std::sin(0.7)).epsilon(1e-6));
    const double sin_long = bu_sup_norm(aug, InputSignal::sinusoid(vec({3.0}), 0.7), th, 50.0);
    CHECK(std::abs(sin_long - 3 * std::sqrt(2.0)) <= 3 * std::sqrt(2.0) / 2048);
    const auto pw = InputSignal::piecewise({0.0, 2.0, 10.0}, {vec({1.0}), vec({-4.0}), vec({2.0})});
    CHECK(bu_sup_norm(aug, pw, th, 1.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(bu_sup_norm(aug, pw, th, 5.0) == doctest::Approx(4 * std::sqrt(2.0)));
}

TEST_CASE("input signal validation") {
    CHECK_THROWS_AS(InputSignal::piecewise({1.0}, {vec({1.0})}), PreconditionError);
    CHECK_THROWS_AS(InputSignal::piecewise({0.0, 1.0}, {vec({1.0})}), PreconditionError);
    CHECK_THROWS_AS(InputSignal::piecewise({0.0, 2.0, 1.0}, {vec({1.0}), vec({2.0}), vec({3.0})}), PreconditionError);
    const auto pw = InputSignal::piecewise({0.0, 1.0}, {vec({1.0}), vec({2.0})});
    CHECK(pw(0.5)[0] == 1.0);
    CHECK(pw(1.0)[0] == 2.0);
    CHECK(pw(99.0)[0] == 2.0);
}

TEST_CASE("simulate: scalar decay") {
    const auto grid = TimeGrid::covering(1.0, 1e-3);
    const auto sim  = simulate(Matrix::Constant(1, 1, -1.0), Matrix::Zero(1, 1), Matrix::Ones(1, 1),
                               Matrix::Zero(1, 1), vec({1.0}), InputSignal::zero(1), grid);
    CHECK(sim.states.times.back() == doctest::Approx(1.0));
    CHECK(std::abs(sim.states.values.back()[0] - std::exp(-1.0)) <= 1e-8);
}

TEST_CASE("simulate: step response reaches the final value") {
    Rng rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix A    = random_hurwitz(rng, 3, 0.5);
        const Matrix B    = rng.uniform_matrix(3, 1, -1, 1);
        const Matrix C    = rng.uniform_matrix(1, 3, -1, 1);
        const double N    = 40 / std::abs(spectral_abscissa(A));
        const auto   grid = TimeGrid::covering(N, default_dt(A, N));
        const auto   sim  = simulate(A, B, C, Matrix::Zero(1, 1), Vector::Zero(3), InputSignal::step(vec({1.0})), grid);
        const double yss  = (-C * A.fullPivLu().solve(B))(0, 0);
        CHECK(std::abs(sim.outputs.values.back()[0] - yss) <= 1e-6);
    }
}

TEST_CASE("simulate: free response decays") {
    Rng          rng(67);
    const Matrix A    = random_hurwitz(rng, 4, 0.5);
    const Vector x0   = rng.uniform_matrix(4, 1, -1, 1).col(0);
    const double N    = 60 / std::abs(spectral_abscissa(A));
    const auto   grid = TimeGrid::covering(N, default_dt(A, N));
    const auto   sim  = simulate(A, Matrix::Zero(4, 1), Matrix::Identity(4, 4), Matrix::Zero(4, 1), x0,
                                 InputSignal::zero(1), grid);
    CHECK(sim.states.values.back().norm() < 1e-6 * x0.norm());
}

TEST_CASE("simulate: superposition") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A    = random_hurwitz(rng, 3, 0.2);
        const Matrix B    = rng.uniform_matrix(3, 2, -1, 1);
        const Matrix C    = rng.uniform_matrix(2, 3, -1, 1);
        const Matrix D    = rng.uniform_matrix(2, 2, -1, 1);
        const Vector x0   = rng.uniform_matrix(3, 1, -1, 1).col(0);
        const auto   u    = InputSignal::sinusoid(vec({1.0, -0.5}), 1.3);
        const auto   grid = TimeGrid::covering(8.0, default_dt(A, 8.0));
        const auto   a    = simulate(A, B, C, D, x0, InputSignal::zero(2), grid);
        const auto   b    = simulate(A, B, C, D, Vector::Zero(3), u, grid);
        const auto   ab   = simulate(A, B, C, D, x0, u, grid);
        for (std::size_t k = 0; k < ab.outputs.size(); k += 50) {
            const Vector sum = a.outputs.values[k] + b.outputs.values[k];
            CHECK((sum - ab.outputs.values[k]).norm() <= 1e-9 * std::max(1.0, ab.outputs.values[k].norm()));
        }
    }
}

TEST_CASE("simulate: RK4 order against expm") {
    Rng rng(73);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix A     = random_hurwitz(rng, 3, 0.3);
        const Vector x0    = rng.uniform_matrix(3, 1, -1, 1).col(0);
        const double T     = 2.0;
        const Vector exact = expm(A * T) * x0;
        double       prev  = 0.0;
        for (double dt : {0.02, 0.01, 0.005}) {
            const auto   grid = TimeGrid::covering(T, dt);
            const auto   sim  = simulate(A, Matrix::Zero(3, 1), Matrix::Identity(3, 3), Matrix::Zero(3, 1), x0,
                                         InputSignal::zero(1), grid);
            const double err  = (sim.states.values.back() - exact).norm();
            if (prev > 0.0) CHECK(prev / err >= std::pow(2.0, 3.9));
            prev = err;
        }
    }
}

TEST_CASE("simulate: step-size and blow-up guards") {
    const Matrix A = Matrix::Constant(1, 1, -100.0);
    CHECK_THROWS_AS(simulate(A, Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1), vec({1.0}),
                             InputSignal::zero(1), TimeGrid::covering(1.0, 0.01)),
                    PreconditionError);
    CHECK_THROWS_AS(simulate(Matrix::Constant(1, 1, 1.0), Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1),
                             vec({1.0}), InputSignal::zero(1), TimeGrid::covering(40.0, 0.01)),
                    NumericalError);
}

TEST_CASE("trajectory CSV has 17 significant digits") {
    Trajectory traj;
    traj.times  = {0.0, 0.1};
    traj.values = {vec({1.0 / 3.0, 2.0}), vec({-1e-20, 0.0})};
    const auto path = std::filesystem::temp_directory_path() / "robest_traj_test.csv";
    write_trajectory_csv(traj, path, "ds_");
    std::ifstream is(path);
    std::string   header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "t,ds_1,ds_2");
    CHECK(row == "0,0.33333333333333331,2");
    std::filesystem::remove(path);
}

TEST_CASE("TimeGrid::covering uses an even step count") {
    for (double N : {0.3, 1.0, 7.7, 145.68}) {
        const auto g = TimeGrid::covering(N, 0.01);
        CHECK(g.steps % 2 == 0);
        CHECK(g.dt <= 0.01);
        CHECK(g.horizon() == doctest::Approx(N));
    }
}

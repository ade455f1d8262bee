#include <doctest.h>

#include <cmath>
#include <vector>

#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "robest/scenarios.hpp"
#include "robest/systems.hpp"

using namespace robest;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

// Random n×n with log-norm shifted to exactly -margin.
Matrix shifted(Rng& rng, Eigen::Index n, double margin) {
    Matrix A = rng.uniform_matrix(n, n, -1, 1);
    return A - (log_norm(A).mu + margin) * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("sym_eig_max oracles") {
    CHECK(sym_eig_max(mat2(-1, 0, 0, -3)) == doctest::Approx(-1.0));
    CHECK(sym_eig_max(Matrix::Identity(4, 4)) == doctest::Approx(1.0));
    CHECK(sym_eig_max(mat2(0, -9.5, -9.5, -2)) == doctest::Approx((-2 + std::sqrt(365.0)) / 2).epsilon(1e-12));
    CHECK_THROWS_AS(sym_eig_max(Matrix::Zero(2, 3)), PreconditionError);
}

TEST_CASE("sym_eig returns an orthonormal decomposition") {
    Rng rng(3);
    for (int n = 1; n <= 8; ++n) {
        Matrix       S   = rng.uniform_matrix(n, n, -1, 1);
        S                = (S + S.transpose()).eval();
        const auto   eig = sym_eig(S);
        const Matrix V   = eig.vectors;
        CHECK((V.transpose() * V - Matrix::Identity(n, n)).norm() < 1e-12);
        CHECK(rel(V * eig.values.asDiagonal() * V.transpose(), S) < 1e-12);
        for (int i = 1; i < n; ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
    }
}

TEST_CASE("log_norm oracles") {
    CHECK(log_norm(-Matrix::Identity(3, 3)).mu == doctest::Approx(-1.0));
    CHECK(log_norm(-Matrix::Identity(3, 3)).is_contractive);
    CHECK(log_norm(mat2(-2, 0, 0, -5)).mu == doctest::Approx(-2.0));
    const auto a0 = log_norm(mat2(0, 1, -20, -2));
    CHECK(a0.mu == doctest::Approx(8.5525).epsilon(1e-4));
    CHECK_FALSE(a0.is_contractive);
    CHECK(spectral_abscissa(mat2(0, 1, -20, -2)) == doctest::Approx(-1.0));
    CHECK(norm2(mat2(3, 0, 0, -4)) == doctest::Approx(4.0));
}

TEST_CASE("expm closed forms") {
    CHECK(expm(Matrix::Zero(3, 3)).isApprox(Matrix::Identity(3, 3)));
    CHECK(expm(mat2(0, 1, 0, 0)).isApprox(mat2(1, 1, 0, 1)));
    const double w = 2.3;
    CHECK(rel(expm(mat2(0, -w, w, 0)), mat2(std::cos(w), -std::sin(w), std::sin(w), std::cos(w))) < 1e-14);
    CHECK(rel(expm(mat2(-50, 0, 0, 40)), mat2(std::exp(-50.0), 0, 0, std::exp(40.0))) < 1e-13);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1)  = std::nan("");
    CHECK_THROWS_AS(expm(bad), PreconditionError);
    CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), PreconditionError);
}

TEST_CASE("expm agrees with RK integration of the columns of I") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix A    = shifted(rng, 3, 0.3);
        const auto   grid = TimeGrid::covering(1.0, 1e-3);
        Matrix cols(3, 3);
        for (int j = 0; j < 3; ++j) {
            const auto s = simulate(A, Matrix::Zero(3, 1), Matrix::Identity(3, 3), Matrix::Zero(3, 1),
                                    Matrix::Identity(3, 3).col(j), InputSignal::zero(1), grid);
            cols.col(j) = s.states.values.back();
        }
        CHECK((cols - expm(A)).norm() <= 1e-9);
    }
}

TEST_CASE("expm semigroup") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix A  = rng.uniform_matrix(4, 4, -2, 2);
        const double t1 = rng.uniform(0, 2), t2 = rng.uniform(0, 2);
        CHECK(rel(expm(A * (t1 + t2)), expm(A * t1) * expm(A * t2)) <= 1e-10);
    }
}

TEST_CASE("expm_param_derivative") {
    SUBCASE("scalar calculus") {
        const Matrix a = Matrix::Constant(1, 1, -2.0), e = Matrix::Constant(1, 1, 1.0);
        CHECK(expm_param_derivative(a, e, 1.5)(0, 0) == doctest::Approx(1.5 * std::exp(-3.0)).epsilon(1e-14));
    }
    SUBCASE("zero direction") {
        CHECK(expm_param_derivative(mat2(-1, 2, 0, -3), Matrix::Zero(2, 2), 0.7).isZero(0.0));
    }
    SUBCASE("central-difference oracle") {
        Rng rng(29);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix A = shifted(rng, 2, 0.2);
            const Matrix E = rng.uniform_matrix(2, 2, -1, 1);
            const double t = rng.uniform(0.1, 3), h = 1e-6;
            const Matrix fd = (expm((A + h * E) * t) - expm((A - h * E) * t)) / (2 * h);
            CHECK(rel(expm_param_derivative(A, E, t), fd) <= 1e-5);
        }
    }
    SUBCASE("shape mismatch") { CHECK_THROWS_AS(expm_param_derivative(mat2(0, 0, 0, 0), Matrix::Zero(3, 3), 1), PreconditionError); }
}

TEST_CASE("log-norm envelopes for e^{At} and its parameter derivative") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n  = 2 + trial % 5;
        const Matrix       A  = shifted(rng, n, 0.5);
        Matrix             E  = rng.uniform_matrix(n, n, -1, 1);
        E /= norm2(E);
        for (int k = 1; k <= 100; ++k) {
            const double t   = 0.1 * k;
            const double env = std::exp(-0.5 * t) * (1 + 1e-9);
            CHECK(norm2(expm(A * t)) <= env);
            CHECK(norm2(expm_param_derivative(A, E, t)) <= t * env);
        }
    }
}

TEST_CASE("reverse-time derivative envelope") {
    // Stated envelope ‖∂e^{-As}‖ ≤ ‖E‖ s e^{|μ(A)| s} fails whenever A has a
    // direction decaying faster than |μ(A)|.
    const Matrix A = mat2(-0.5, 0, 0, -5);
    const Matrix E = mat2(0, 0, 0, 1);
    const double s = 2.0;
    const double d = norm2(expm_param_derivative(-A, -E, s));
    CHECK(d == doctest::Approx(s * std::exp(5.0 * s)).epsilon(1e-10));
    CHECK(d > s * std::exp(std::abs(log_norm(A).mu) * s));

    // The envelope holds with the growth rate μ(-A) = -λ_min(sym A).
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n   = 2 + trial % 4;
        const Matrix       B   = shifted(rng, n, 0.5);
        Matrix             F   = rng.uniform_matrix(n, n, -1, 1);
        F /= norm2(F);
        const double growth = log_norm(-B).mu;
        CHECK(growth >= std::abs(log_norm(B).mu));
        for (int k = 1; k <= 20; ++k) {
            const double t = 0.1 * k;
            CHECK(norm2(expm_param_derivative(-B, -F, t)) <= t * std::exp(growth * t) * (1 + 1e-9));
        }
    }
}

TEST_CASE("lyap_observability") {
    SUBCASE("scalar") {
        const auto sol = lyap_observability(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0));
        CHECK(sol.P(0, 0) == doctest::Approx(0.5));
    }
    SUBCASE("negative identity") {
        const Matrix Q = mat2(2, 1, 1, 3);
        CHECK(lyap_observability(-Matrix::Identity(2, 2), Q).P.isApprox(Q / 2));
    }
    SUBCASE("random stable systems: residual, symmetry and PSD") {
        Rng rng(47);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix A = rng.uniform_matrix(4, 4, -1, 1);
            A -= (spectral_abscissa(A) + 0.3) * Matrix::Identity(4, 4);
            const Matrix C   = rng.uniform_matrix(2, 4, -1, 1);
            const Matrix Q   = C.transpose() * C;
            const auto   sol = lyap_observability(A, Q);
            CHECK(sol.residual <= 1e-8 * (norm2(A) * norm2(sol.P) + norm2(Q)));
            CHECK((sol.P - sol.P.transpose()).norm() <= 1e-12 * sol.P.norm());
            CHECK(sym_eig_min(sol.P) >= -1e-10 * norm2(sol.P));
        }
    }
    SUBCASE("non-Hurwitz is rejected with the spectral abscissa") {
        try {
            lyap_observability(mat2(0.1, 0, 0, -1), Matrix::Identity(2, 2));
            FAIL("expected rejection");
        } catch (const PreconditionError& e) {
            CHECK(std::string(e.what()).find("0.1") != std::string::npos);
        }
    }
}

TEST_CASE("gramian_finite") {
    SUBCASE("scalar closed form") {
        const Matrix g = gramian_finite(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0), 2.0);
        CHECK(std::abs(g(0, 0) - (1 - std::exp(-4.0)) / 2) <= 1e-8);
    }
    SUBCASE("zero output map") { CHECK(gramian_finite(mat2(-1, 0, 0, -2), Matrix::Zero(1, 2), 3.0).isZero(0.0)); }
    SUBCASE("non-positive horizon") {
        CHECK_THROWS_AS(gramian_finite(mat2(-1, 0, 0, -2), Matrix::Ones(1, 2), 0.0), PreconditionError);
    }
    SUBCASE("long horizon approaches the Lyapunov solution, monotone in N") {
        Rng rng(53);
        for (int trial = 0; trial < 5; ++trial) {
            Matrix A = rng.uniform_matrix(3, 3, -1, 1);
            A -= (spectral_abscissa(A) + 0.5) * Matrix::Identity(3, 3);
            const Matrix C = rng.uniform_matrix(1, 3, -1, 1);
            const double N = 60 / std::abs(spectral_abscissa(A));
            const double p = lyap_observability(A, C.transpose() * C).P.trace();
            CHECK(gramian_finite(A, C, N).trace() == doctest::Approx(p).epsilon(1e-6));
            double prev = 0.0;
            for (double n : {0.5, 1.0, 2.0, 4.0}) {
                const double tr = gramian_finite(A, C, n).trace();
                CHECK(tr >= prev);
                prev = tr;
            }
        }
    }
}

TEST_CASE("simpson and sqrtm_psd") {
    std::vector<double> xs;
    const int           n = 7;  // odd interval count exercises the 3/8 tail
    for (int k = 0; k <= n; ++k) xs.push_back(std::pow(k * 0.5, 3));
    CHECK(simpson(xs, 0.5) == doctest::Approx(std::pow(3.5, 4) / 4).epsilon(1e-12));
    CHECK(simpson(std::vector<double>{1.0, 3.0}, 2.0) == doctest::Approx(4.0));

    const Matrix S = mat2(5, 2, 2, 3);
    const Matrix R = sqrtm_psd(S);
    CHECK(rel(R * R, S) < 1e-13);
    CHECK(sym_eig_min(R) > 0);
}

#include <doctest.h>

#include <json.hpp>

#include "robest/config.hpp"
#include "robest/error.hpp"
#include "robest/linalg.hpp"
#include "robest/scenarios.hpp"

using namespace robest;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("preset scenarios") {
    const auto all = paper_scenarios();
    REQUIRE(all.size() == 6);
    const Scenario& s1 = all.front();
    CHECK(s1.truth.A.eval(vec({0.0})).isApprox(mat2(0, 1, -20, -2)));
    CHECK(s1.truth.A.partial(0, vec({0.0})).isApprox(mat2(0, 0, -5, -0.5)));
    CHECK(s1.estimate.A.eval(vec({1.0})).isApprox(mat2(0, 1, -24.90, -2.53)));
    CHECK(s1.truth.B.eval(vec({0.0})).isApprox(Matrix(Eigen::Vector2d(0, 1))));
    CHECK(s1.truth.C.eval(vec({0.0})).isApprox(Matrix(Eigen::RowVector2d(1, 0))));
    for (const auto& sc : all) {
        CHECK_NOTHROW(sc.validate());
        const auto aug = build_augmented(sc.truth, sc.estimate);
        CHECK(spectral_abscissa(aug.eval(sc.truth.spec.nominal_vector()).A) < 0);
    }
    CHECK(paper_scenario("two_param").truth.spec.size() == 2);
    CHECK(paper_scenario("x0_quadratic").truth.A.is_constant());
    CHECK_THROWS_AS(paper_scenario("nope"), PreconditionError);
}

TEST_CASE("random_stable_augmented") {
    for (std::uint64_t seed : {1u, 7u, 99u}) {
        const auto sc  = random_stable_augmented(3, seed, 0.5);
        const auto aug = build_augmented(sc.truth, sc.estimate);
        const auto A   = aug.eval(sc.truth.spec.nominal_vector()).A;
        CHECK(std::abs(log_norm(A).mu + 0.5) <= 1e-10);
        CHECK(spectral_abscissa(A) < 0);
        const auto again = random_stable_augmented(3, seed, 0.5);
        CHECK(again.truth.A.eval(vec({0.3})) == sc.truth.A.eval(vec({0.3})));
        CHECK(again.estimate.B.eval(vec({0.3})) == sc.estimate.B.eval(vec({0.3})));
    }
    CHECK_THROWS_AS(random_stable_augmented(0, 1, 0.5), PreconditionError);
    CHECK_THROWS_AS(random_stable_augmented(3, 1, 0.0), PreconditionError);
}

TEST_CASE("random_stable_initial_condition has parameter-free dynamics") {
    const auto sc  = random_stable_initial_condition(4, 3, 0.5);
    const auto aug = build_augmented(sc.truth, sc.estimate);
    CHECK(aug.dynamics_parameter_free());
    CHECK_FALSE(aug.xbar0.is_constant());
}

TEST_CASE("ParamMatrix JSON round trip") {
    const ParamVectorSpec spec({"a", "b"}, {0.5, 0.5});
    const auto            pm = ParamMatrix::constant(mat2(1, 2, 3, 4))
                        .with_term(Monomial::variable(0, 2), mat2(0, 1, 0, 0))
                        .with_term(Monomial::variable(0) * Monomial::variable(1), mat2(0, 0, -1, 0));
    const auto back = param_matrix_from_json(param_matrix_to_json(pm, spec), spec);
    for (double a : {-1.0, 0.3, 2.0})
        for (double b : {-0.5, 1.5}) CHECK(back.eval(vec({a, b})) == pm.eval(vec({a, b})));

    const auto j = nlohmann::json::parse(R"({"rows":2,"cols":2,"terms":[{"powers":{"c":1},"coeff":[[1,0],[0,1]]}]})");
    CHECK_THROWS_AS(param_matrix_from_json(j, spec), PreconditionError);
    const auto bad = nlohmann::json::parse(R"({"rows":2,"cols":2,"terms":[{"powers":{"a":1},"coeff":[[1,0,0],[0,1,0]]}]})");
    CHECK_THROWS_AS(param_matrix_from_json(bad, spec), PreconditionError);
    CHECK(param_matrix_from_json(nlohmann::json::parse("[1, 2, 3]"), spec).cols() == 1);
}

TEST_CASE("run config parsing") {
    const auto j   = nlohmann::json::parse(R"({
        "seed": 5, "mode": "strict", "dt": 0.001,
        "scenarios": ["preset:affine", {"random": {"count": 2, "n": 2, "kind": "initial_condition"}}]
    })");
    const auto cfg = run_config_from_json(j);
    CHECK(cfg.seed == 5);
    CHECK(cfg.analysis.mode == AnalysisMode::strict);
    CHECK(*cfg.analysis.dt == 0.001);
    CHECK(cfg.scenarios.size() == 3);
    CHECK(cfg.scenarios[0].name == "affine");

    CHECK(run_config_from_json(nlohmann::json::parse(R"({"scenarios":["preset:all"]})")).scenarios.size() == 6);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"scenarios":[]})")), PreconditionError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"scenarios":["preset:zzz"]})")), PreconditionError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"mode":"lax","scenarios":["preset:all"]})")),
                    PreconditionError);
}

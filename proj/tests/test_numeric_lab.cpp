#include <doctest.h>

#include "rddym/parser.hpp"
#include "rddym/suite.hpp"

using namespace rddym;

namespace {

struct Fix {
    Catalog cat = Catalog::load(RDDYM_SOURCE_CATALOG);
    const Workspace& ws = cat.workspace();
    NumericFixtures fx = make_numeric_fixtures(cat);
};

}  // namespace

TEST_CASE("symbolic gate certifies the travelling-wave and linear families") {
    Fix f;
    CHECK(certify_solution(f.fx.rdDym_cubic, f.cat.system("eq.rdDym"), f.ws).status ==
          CheckStatus::Pass);
    CHECK(f.fx.rdDym_cubic.certified);
    CHECK(certify_solution(f.fx.rdDym2_linear, f.cat.system("sys.rdDym2"), f.ws).status ==
          CheckStatus::Pass);
    // any travelling profile solves the base equation; try another exponent
    ExactSolution quad;
    quad.id = "quad";
    quad.fields = {{f.ws.require("u"), parse_expression("(x + 2*y)^2 + x + 2*y", f.ws), false}};
    CHECK(certify_solution(quad, f.cat.system("eq.rdDym"), f.ws).status == CheckStatus::Pass);
}

TEST_CASE("symbolic gate handles the square-root family via its jet relations") {
    Fix f;
    CheckOutcome gate = certify_solution(f.fx.rdDym2_sqrt, f.cat.system("sys.rdDym2"), f.ws);
    CHECK(gate.status == CheckStatus::Pass);
    CHECK(f.fx.rdDym2_sqrt.certified);
    // breaking the inner linear function breaks the certificate
    ExactSolution broken = f.fx.rdDym2_sqrt;
    broken.fields[1].value = parse_expression("2*(x + 2*y) + x^2", f.ws);
    CHECK(certify_solution(broken, f.cat.system("sys.rdDym2"), f.ws).status == CheckStatus::Fail);
}

TEST_CASE("the planted non-solution is rejected with its exact defect") {
    Fix f;
    CheckOutcome gate = certify_solution(f.fx.control, f.cat.system("eq.rdDym"), f.ws);
    CHECK(gate.status == CheckStatus::Fail);
    CHECK(gate.residual == normalize(parse_expression("x - t^2*y", f.ws), f.ws).str(f.ws));
}

TEST_CASE("grid residuals: linear solutions are exact, cubic converges at order 2") {
    Fix f;
    GridSpec g = f.fx.grid;
    auto res = evaluate_residual_grid(f.fx.rdDym2_linear, f.cat.system("sys.rdDym2"), g, f.ws);
    REQUIRE(res.size() == 2);
    CHECK(res[0] <= 1e-10);
    CHECK(res[1] <= 1e-10);

    ConvergenceReport linear =
        estimate_convergence_order(f.fx.rdDym2_linear, f.cat.system("sys.rdDym2"), g, 2, f.ws);
    CHECK(linear.exact);

    ConvergenceReport cubic =
        estimate_convergence_order(f.fx.rdDym_cubic, f.cat.system("eq.rdDym"), g, 3, f.ws);
    CHECK(!cubic.exact);
    CHECK(cubic.slope > 1.6);
    CHECK(cubic.slope < 2.4);
    // residuals decrease monotonically under halving
    for (size_t i = 1; i < cubic.rows.size(); ++i)
        CHECK(cubic.rows[i].residual < cubic.rows[i - 1].residual * 1.1);

    ConvergenceReport control =
        estimate_convergence_order(f.fx.control, f.cat.system("eq.rdDym"), g, 3, f.ws);
    CHECK(std::abs(control.slope) < 0.5);
}

TEST_CASE("grid validation") {
    Fix f;
    GridSpec bad = f.fx.grid;
    bad.points = {4, 9, 9};
    CHECK_THROWS_AS(evaluate_residual_grid(f.fx.rdDym2_linear, f.cat.system("sys.rdDym2"), bad, f.ws),
                    ValidationError);
    GridSpec degenerate = f.fx.grid;
    degenerate.hi[0] = degenerate.lo[0];
    CHECK_THROWS_AS(
        evaluate_residual_grid(f.fx.rdDym2_linear, f.cat.system("sys.rdDym2"), degenerate, f.ws),
        ValidationError);
    CHECK_THROWS_AS(
        estimate_convergence_order(f.fx.rdDym2_linear, f.cat.system("sys.rdDym2"), f.fx.grid, 1, f.ws),
        ValidationError);
}

TEST_CASE("commutativity of the two covering flows") {
    Fix f;
    CommutativitySetup setup = f.fx.commut;
    setup.levels = 3;  // keep the unit test quick
    CommutativityReport cert =
        commutativity_test(f.cat.covering("cov.lambda"), f.fx.rdDym_cubic, setup, f.ws);
    CHECK(cert.slope >= 1.6);
    for (size_t i = 1; i < cert.rows.size(); ++i)
        CHECK(cert.rows[i].mismatch < cert.rows[i - 1].mismatch);

    CommutativityReport ctrl =
        commutativity_test(f.cat.covering("cov.lambda"), f.fx.control, setup, f.ws);
    for (size_t i = 0; i < ctrl.rows.size(); ++i)
        CHECK(cert.rows[i].mismatch < ctrl.rows[i].mismatch);
    // incompatibility shows up as a non-vanishing mismatch per unit area
    CHECK(ctrl.defect_slope < 0.5);

    CommutativitySetup zero_lambda = setup;
    zero_lambda.lambda = 0.0;
    CHECK_THROWS_AS(
        commutativity_test(f.cat.covering("cov.lambda"), f.fx.rdDym_cubic, zero_lambda, f.ws),
        ValidationError);
}

TEST_CASE("a constant base field makes both flows plain transport") {
    Fix f;
    ExactSolution flat;
    flat.id = "flat";
    flat.fields = {{f.ws.require("u"), ex::zero(), false}};
    CHECK(certify_solution(flat, f.cat.system("eq.rdDym"), f.ws).status == CheckStatus::Pass);
    CommutativitySetup setup = f.fx.commut;
    setup.levels = 2;
    CommutativityReport rep = commutativity_test(f.cat.covering("cov.lambda"), flat, setup, f.ws);
    for (const auto& row : rep.rows) CHECK(row.mismatch <= 1e-10);
}
